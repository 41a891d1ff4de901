#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fringe/image.hpp"
#include "fringe/ops.hpp"
#include "fringe/phase.hpp"

namespace fringe {

// Quadrature pairs below this magnitude carry no fringe signal; the pixel
// is flagged invalid instead of returning atan2 noise.
inline constexpr double zero_modulation_eps = 1e-12;

// Wrapped phase raster in [0, 2*pi) plus a per-pixel validity mask.
struct PhaseMap {
  Image phase;
  std::vector<uint8_t> valid;

  PhaseMap() = default;
  PhaseMap(int w, int h) : phase(w, h), valid(static_cast<size_t>(w) * h, 1) {}

  int width() const { return phase.width; }
  int height() const { return phase.height; }
  size_t size() const { return phase.size(); }
  bool is_valid(size_t p) const { return valid[p] != 0; }
  size_t invalid_count() const {
    size_t n = 0;
    for (uint8_t v : valid) n += (v == 0);
    return n;
  }
};

// ---- scalar kernels -------------------------------------------------------
// These operate on one pixel's intensity window and are shared by the
// raster wrappers, the streaming engine, the Monte Carlo sampler, and the
// cost-model counter, so every consumer runs the identical arithmetic.

// atan2 folded into [0, 2*pi).
inline double principal_phase(double num, double den) {
  double phi = std::atan2(num, den);
  if (phi < 0.0) phi += two_pi;
  return phi;
}

// Four quarter-period shifts, window-local indexing.
template <class T>
inline double four_step_pixel(const double* I, bool& valid, T& tally) {
  double num = I[1] - I[3];
  double den = I[0] - I[2];
  tally.addsub(2);
  if (std::abs(num) < zero_modulation_eps && std::abs(den) < zero_modulation_eps) {
    valid = false;
    return 0.0;
  }
  valid = true;
  tally.arctan(1);
  return principal_phase(num, den);
}

// Three quarter-period shifts, window-local indexing.
template <class T>
inline double three_step_pixel(const double* I, bool& valid, T& tally) {
  double num = (I[1] - I[0]) + (I[1] - I[2]);
  double den = I[0] - I[2];
  tally.addsub(3);
  if (std::abs(num) < zero_modulation_eps && std::abs(den) < zero_modulation_eps) {
    valid = false;
    return 0.0;
  }
  valid = true;
  tally.arctan(1);
  return principal_phase(num, den);
}

// General N-step least-squares retrieval, window-local shifts 2*pi*n/N.
inline double nstep_pixel(const double* I, int N, bool& valid) {
  double s = 0.0, c = 0.0;
  for (int n = 0; n < N; ++n) {
    double d = two_pi * static_cast<double>(n) / N;
    s += I[n] * std::sin(d);
    c += I[n] * std::cos(d);
  }
  if (std::abs(s) < zero_modulation_eps && std::abs(c) < zero_modulation_eps) {
    valid = false;
    return 0.0;
  }
  valid = true;
  return principal_phase(s, c);
}

// Shift a window-local phase back onto the common datum of absolute frame
// index t; the quarter-period premultiple is a hoisted constant.
template <class T>
inline double rebase_pixel(double phi, long t, T& tally) {
  tally.addsub(2);
  tally.mod(1);
  return wrap_to_2pi(phi + static_cast<double>(t) * (pi / 2.0));
}

// ---- raster wrappers ------------------------------------------------------

namespace detail {
inline void require_window(const std::vector<Image>& window, size_t need) {
  if (window.size() < need) throw std::invalid_argument("phase retrieval: window too short");
  for (const Image& f : window)
    if (!f.same_shape(window.front()))
      throw std::invalid_argument("phase retrieval: frame shapes differ");
}
}  // namespace detail

// N-step retrieval over a window of exactly N frames.
inline PhaseMap wrapped_phase_nstep(const std::vector<Image>& window, int N) {
  if (N < 3) throw std::invalid_argument("wrapped_phase_nstep: need at least 3 steps");
  if (window.size() != static_cast<size_t>(N))
    throw std::invalid_argument("wrapped_phase_nstep: window size must equal N");
  detail::require_window(window, static_cast<size_t>(N));
  PhaseMap out(window[0].width, window[0].height);
  std::vector<double> I(static_cast<size_t>(N));
  for (size_t p = 0; p < out.size(); ++p) {
    for (int n = 0; n < N; ++n) I[static_cast<size_t>(n)] = window[static_cast<size_t>(n)].data[p];
    bool ok = true;
    out.phase.data[p] = nstep_pixel(I.data(), N, ok);
    out.valid[p] = ok ? 1 : 0;
  }
  return out;
}

inline PhaseMap wrapped_phase_4step(const std::vector<Image>& window, size_t first = 0) {
  if (window.size() < first + 4) throw std::invalid_argument("wrapped_phase_4step: window too short");
  detail::require_window(window, first + 4);
  PhaseMap out(window[first].width, window[first].height);
  NoTally nt;
  for (size_t p = 0; p < out.size(); ++p) {
    double I[4] = {window[first].data[p], window[first + 1].data[p], window[first + 2].data[p],
                   window[first + 3].data[p]};
    bool ok = true;
    out.phase.data[p] = four_step_pixel(I, ok, nt);
    out.valid[p] = ok ? 1 : 0;
  }
  return out;
}

inline PhaseMap wrapped_phase_3step(const std::vector<Image>& window, size_t first = 0) {
  if (window.size() < first + 3) throw std::invalid_argument("wrapped_phase_3step: window too short");
  detail::require_window(window, first + 3);
  PhaseMap out(window[first].width, window[first].height);
  NoTally nt;
  for (size_t p = 0; p < out.size(); ++p) {
    double I[3] = {window[first].data[p], window[first + 1].data[p], window[first + 2].data[p]};
    bool ok = true;
    out.phase.data[p] = three_step_pixel(I, ok, nt);
    out.valid[p] = ok ? 1 : 0;
  }
  return out;
}

// Rebase a whole map onto the datum of absolute frame t.
inline PhaseMap rebase_phase(const PhaseMap& map, long t) {
  PhaseMap out = map;
  NoTally nt;
  for (size_t p = 0; p < out.size(); ++p)
    if (out.valid[p]) out.phase.data[p] = rebase_pixel(map.phase.data[p], t, nt);
  return out;
}

}  // namespace fringe
