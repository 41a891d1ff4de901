#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fringe/image.hpp"
#include "fringe/ops.hpp"
#include "fringe/phase.hpp"
#include "fringe/retrieval.hpp"

namespace fringe {

// Largest Pascal row kept exactly in 64-bit integers by this library.
inline constexpr int max_binomial_row = 60;

// Row K of Pascal's triangle as exact integers.
inline std::vector<uint64_t> binomial_row(int K) {
  if (K < 0) throw std::invalid_argument("binomial_row: negative row");
  if (K > max_binomial_row)
    throw std::invalid_argument("binomial_row: row too large for exact 64-bit coefficients");
  std::vector<uint64_t> c{1};
  for (int r = 1; r <= K; ++r) {
    c.push_back(1);
    for (int j = r - 1; j >= 1; --j) c[static_cast<size_t>(j)] += c[static_cast<size_t>(j) - 1];
  }
  return c;
}

// Average of two wrapped phases along the shorter arc, in [0, 2*pi).
// Antipodal inputs (gap exactly pi) take the plain midpoint branch.
template <class T>
inline double oplus(double a, double b, T& tally) {
  tally.addsub(1);
  tally.muldiv(2);
  tally.cmp(1);
  tally.mod(1);
  double m = 0.5 * (a + b);
  if (std::abs(a - b) <= pi) return wrap_to_2pi(m);
  return wrap_to_2pi(m + pi);
}

inline double oplus(double a, double b) {
  NoTally nt;
  return oplus(a, b, nt);
}

enum class Method { pbsc3, pbsc4, ibsc };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::pbsc3: return "pbsc3";
    case Method::pbsc4: return "pbsc4";
    case Method::ibsc: return "ibsc";
  }
  return "?";
}

inline Method method_from_name(const std::string& s) {
  if (s == "pbsc3") return Method::pbsc3;
  if (s == "pbsc4") return Method::pbsc4;
  if (s == "ibsc") return Method::ibsc;
  throw std::invalid_argument("unknown method '" + s + "' (expected pbsc3, pbsc4 or ibsc)");
}

// Frames a depth-K compensation consumes.
inline int method_window(Method m, int K) {
  if (K < 0) throw std::invalid_argument("method_window: negative depth");
  return m == Method::pbsc3 ? K + 3 : K + 4;
}

// Frames that must arrive before the first output in streaming use.
inline int method_warmup(Method m, int K) { return method_window(m, K) - 1; }

// ---- phase-domain compensation (pairwise averaging pyramid) ---------------

// One pixel: K+1 successive wrapped retrievals, each rebased onto the
// common datum, then folded pairwise K times.  I points at the window of
// K+N intensity samples; t0 is the absolute index of the first frame.
template <class T>
inline double pbsc_pixel(const double* I, int N, int K, long t0, bool& valid, T& tally) {
  std::array<double, max_binomial_row + 1> phi;
  for (int t = 0; t <= K; ++t) {
    bool ok = true;
    double p = (N == 4) ? four_step_pixel(I + t, ok, tally) : three_step_pixel(I + t, ok, tally);
    if (!ok) {
      valid = false;
      return 0.0;
    }
    phi[static_cast<size_t>(t)] = rebase_pixel(p, t0 + t, tally);
  }
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < K - k; ++i)
      phi[static_cast<size_t>(i)] =
          oplus(phi[static_cast<size_t>(i)], phi[static_cast<size_t>(i) + 1], tally);
  valid = true;
  return phi[0];
}

namespace detail {
inline void check_bsc_args(const std::vector<Image>& frames, int N, int K, long t0) {
  if (N != 3 && N != 4) throw std::invalid_argument("compensation: N must be 3 or 4");
  if (K < 0) throw std::invalid_argument("compensation: negative depth");
  if (K > max_binomial_row) throw std::invalid_argument("compensation: depth too large");
  if (t0 < 0) throw std::invalid_argument("compensation: negative start index");
  size_t need = static_cast<size_t>(K + N);
  if (frames.size() < need) throw std::invalid_argument("compensation: window too short");
  for (const Image& f : frames)
    if (!f.same_shape(frames.front()))
      throw std::invalid_argument("compensation: frame shapes differ");
}
}  // namespace detail

// Phase-domain compensation over frames[0 .. K+N-1]; the window's first
// frame has absolute index t0 (0 for a batch capture from rest).
inline PhaseMap pbsc(const std::vector<Image>& frames, int N, int K, long t0 = 0) {
  detail::check_bsc_args(frames, N, K, t0);
  int count = K + N;
  PhaseMap out(frames[0].width, frames[0].height);
  std::vector<double> I(static_cast<size_t>(count));
  NoTally nt;
  for (size_t p = 0; p < out.size(); ++p) {
    for (int n = 0; n < count; ++n) I[static_cast<size_t>(n)] = frames[static_cast<size_t>(n)].data[p];
    bool ok = true;
    out.phase.data[p] = pbsc_pixel(I.data(), N, K, t0, ok, nt);
    out.valid[p] = ok ? 1 : 0;
  }
  return out;
}

// ---- intensity-domain compensation -----------------------------------------

// Position of the sample that the m-th binomially weighted sum takes from
// layer k: the largest index <= k+3 congruent to m modulo 4.
inline int ibsc_index(int m, int k) {
  if (m < 0 || m > 3) throw std::invalid_argument("ibsc_index: m must be in 0..3");
  if (k < 0) throw std::invalid_argument("ibsc_index: negative layer");
  return (k + 3) - ((k + 3 - m) % 4);
}

// One pixel: four binomially weighted intensity sums and a single arctan.
// Only a window whose datum differs from the common one (t0 % 4 != 0)
// needs a rebase afterwards.
template <class T>
inline double ibsc_pixel(const double* I, int K, long t0, const uint64_t* coeff, bool& valid,
                         T& tally) {
  double S0 = 0.0, S1 = 0.0, S2 = 0.0, S3 = 0.0;
  for (int k = 0; k <= K; ++k) {
    double c = static_cast<double>(coeff[k]);
    S0 += c * I[ibsc_index(0, k)];
    S1 += c * I[ibsc_index(1, k)];
    S2 += c * I[ibsc_index(2, k)];
    S3 += c * I[ibsc_index(3, k)];
  }
  double num = S1 - S3;
  double den = S0 - S2;
  tally.muldiv(4LL * K);
  tally.addsub(4LL * K + 2);
  if (std::abs(num) < zero_modulation_eps && std::abs(den) < zero_modulation_eps) {
    valid = false;
    return 0.0;
  }
  valid = true;
  tally.arctan(1);
  double phi = principal_phase(num, den);
  if (t0 % 4 != 0) phi = rebase_pixel(phi, t0, tally);
  return phi;
}

// Intensity-domain compensation over frames[0 .. K+3].
inline PhaseMap ibsc(const std::vector<Image>& frames, int K, long t0 = 0) {
  detail::check_bsc_args(frames, 4, K, t0);
  std::vector<uint64_t> coeff = binomial_row(K);
  int count = K + 4;
  PhaseMap out(frames[0].width, frames[0].height);
  std::vector<double> I(static_cast<size_t>(count));
  NoTally nt;
  for (size_t p = 0; p < out.size(); ++p) {
    for (int n = 0; n < count; ++n) I[static_cast<size_t>(n)] = frames[static_cast<size_t>(n)].data[p];
    bool ok = true;
    out.phase.data[p] = ibsc_pixel(I.data(), K, t0, coeff.data(), ok, nt);
    out.valid[p] = ok ? 1 : 0;
  }
  return out;
}

// The four weighted sums as rasters, for inspection and modulation maps.
struct CompensatedImages {
  std::array<Image, 4> sum;
  int K = 0;
};

inline CompensatedImages ibsc_compensated_images(const std::vector<Image>& frames, int K) {
  detail::check_bsc_args(frames, 4, K, 0);
  std::vector<uint64_t> coeff = binomial_row(K);
  CompensatedImages out;
  out.K = K;
  for (int m = 0; m < 4; ++m) out.sum[static_cast<size_t>(m)] = Image(frames[0].width, frames[0].height);
  for (int k = 0; k <= K; ++k) {
    double c = static_cast<double>(coeff[static_cast<size_t>(k)]);
    for (int m = 0; m < 4; ++m) {
      const Image& src = frames[static_cast<size_t>(ibsc_index(m, k))];
      Image& dst = out.sum[static_cast<size_t>(m)];
      for (size_t p = 0; p < dst.size(); ++p) dst.data[p] += c * src.data[p];
    }
  }
  return out;
}

// Fringe modulation amplitude recovered from the weighted sums; the
// binomial mass 2^K and the two-sample quadrature gain fold into one
// normalization.
inline Image ibsc_modulation(const CompensatedImages& ci) {
  Image out(ci.sum[0].width, ci.sum[0].height);
  double scale = std::ldexp(1.0, -(ci.K + 1));  // 2^-(K+1)
  for (size_t p = 0; p < out.size(); ++p) {
    double num = ci.sum[1].data[p] - ci.sum[3].data[p];
    double den = ci.sum[0].data[p] - ci.sum[2].data[p];
    out.data[p] = scale * std::hypot(num, den);
  }
  return out;
}

// ---- streaming --------------------------------------------------------------

// Fixed-depth sliding-window engine: push frames one at a time, get one
// phase map per frame once the window is full.  Results are bit-identical
// to calling the batch routine on the same window because it is the same
// routine.
class SlidingStream {
 public:
  SlidingStream(Method method, int K)
      : method_(method), K_(K), window_(method_window(method, K)) {
    if (K > max_binomial_row) throw std::invalid_argument("SlidingStream: depth too large");
  }

  std::optional<PhaseMap> push(const Image& frame) {
    if (!buf_.empty() && !frame.same_shape(buf_.front()))
      throw std::invalid_argument("SlidingStream: frame shape changed mid-stream");
    buf_.push_back(frame);
    if (buf_.size() > static_cast<size_t>(window_)) buf_.erase(buf_.begin());
    ++seen_;
    if (buf_.size() < static_cast<size_t>(window_)) return std::nullopt;
    long t0 = seen_ - window_;
    ++emitted_;
    if (method_ == Method::ibsc) return ibsc(buf_, K_, t0);
    return pbsc(buf_, method_ == Method::pbsc3 ? 3 : 4, K_, t0);
  }

  int window_size() const { return window_; }
  int warmup() const { return window_ - 1; }
  long frames_seen() const { return seen_; }
  long maps_emitted() const { return emitted_; }

 private:
  Method method_;
  int K_;
  int window_;
  long seen_ = 0;
  long emitted_ = 0;
  std::vector<Image> buf_;
};

}  // namespace fringe
