#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fringe/bsc.hpp"
#include "fringe/image.hpp"
#include "fringe/imaging.hpp"
#include "fringe/phase.hpp"
#include "fringe/retrieval.hpp"

namespace fringe {

// Interleaved projection plan: which fringe frequency and which phase step
// each capture slot carries.
struct ProjectionSchedule {
  std::vector<double> frequencies;
  std::vector<std::pair<int, int>> order;  // (frequency index, step index) per slot
};

// Round-robin over frequencies at each step index, so every frequency's
// frames are evenly spaced through the capture.
inline ProjectionSchedule interleave_schedule(const std::vector<double>& frequencies, int N,
                                              int cycles) {
  if (frequencies.empty()) throw std::invalid_argument("interleave_schedule: no frequencies");
  if (frequencies.size() > 3) throw std::invalid_argument("interleave_schedule: at most 3 frequencies");
  if (N < 3) throw std::invalid_argument("interleave_schedule: need at least 3 steps");
  if (cycles < 1) throw std::invalid_argument("interleave_schedule: need at least one cycle");
  ProjectionSchedule s;
  s.frequencies = frequencies;
  int F = static_cast<int>(frequencies.size());
  long slots = static_cast<long>(F) * N * cycles;
  s.order.reserve(static_cast<size_t>(slots));
  for (long j = 0; j < slots; ++j)
    s.order.emplace_back(static_cast<int>(j % F), static_cast<int>((j / F) % N));
  return s;
}

// Unwrapped phase plus the integer fringe order that produced it.
struct AbsolutePhaseMap {
  Image phi;
  std::vector<long> order;
  std::vector<uint8_t> valid;

  size_t size() const { return phi.size(); }
};

namespace detail {
// Every unwrapper funnels through here so the order/phase consistency
// invariant is enforced on construction.
inline AbsolutePhaseMap make_absolute(const PhaseMap& wrapped, std::vector<long> order) {
  AbsolutePhaseMap out;
  out.phi = wrapped.phase;
  out.order = std::move(order);
  out.valid = wrapped.valid;
  for (size_t p = 0; p < out.size(); ++p) {
    double abs_phi = wrapped.phase.data[p] + two_pi * static_cast<double>(out.order[p]);
    out.phi.data[p] = abs_phi;
    if (out.valid[p] && std::abs(phase_diff_wrapped(abs_phi, wrapped.phase.data[p])) > 1e-9)
      throw std::runtime_error("AbsolutePhaseMap: order/phase consistency violated");
  }
  return out;
}

inline void require_same_shape(const PhaseMap& a, const PhaseMap& b, const char* who) {
  if (a.width() != b.width() || a.height() != b.height())
    throw std::invalid_argument(std::string(who) + ": phase map shapes differ");
}
}  // namespace detail

// Coarse-to-fine unwrapping: a unit-frequency map fixes the fringe order
// of the fine map by rounding.
inline AbsolutePhaseMap unwrap_hierarchical(const PhaseMap& phi_high, const PhaseMap& phi_unit,
                                            double f_high) {
  detail::require_same_shape(phi_high, phi_unit, "unwrap_hierarchical");
  if (!(f_high >= 1.0)) throw std::invalid_argument("unwrap_hierarchical: f_high must be >= 1");
  std::vector<long> order(phi_high.size(), 0);
  PhaseMap combined = phi_high;
  for (size_t p = 0; p < phi_high.size(); ++p) {
    combined.valid[p] = phi_high.valid[p] && phi_unit.valid[p];
    if (!combined.valid[p]) continue;
    order[p] = std::lround((f_high * phi_unit.phase.data[p] - phi_high.phase.data[p]) / two_pi);
  }
  return detail::make_absolute(combined, std::move(order));
}

// Three-frequency heterodyne: beat the neighbours pairwise, beat the beats
// to a period spanning the field of view, then cascade hierarchically back
// down to the finest map.
inline AbsolutePhaseMap unwrap_heterodyne3(const PhaseMap& phi1, const PhaseMap& phi2,
                                           const PhaseMap& phi3,
                                           const std::array<double, 3>& wavelengths,
                                           double fov_width) {
  detail::require_same_shape(phi1, phi2, "unwrap_heterodyne3");
  detail::require_same_shape(phi1, phi3, "unwrap_heterodyne3");
  double l1 = wavelengths[0], l2 = wavelengths[1], l3 = wavelengths[2];
  if (!(l1 > 0.0 && l2 > l1 && l3 > l2))
    throw std::invalid_argument("unwrap_heterodyne3: wavelengths must be increasing and positive");
  double l12 = l1 * l2 / (l2 - l1);
  double l23 = l2 * l3 / (l3 - l2);
  if (!(l23 > l12)) throw std::invalid_argument("unwrap_heterodyne3: degenerate beat cascade");
  double l123 = l12 * l23 / (l23 - l12);
  if (l123 < fov_width)
    throw std::invalid_argument("unwrap_heterodyne3: beat period does not span the field of view");

  std::vector<long> order(phi1.size(), 0);
  PhaseMap combined = phi1;
  double r12 = l123 / l12;  // beat-of-beats periods per first beat
  double r1 = l12 / l1;     // first-beat periods per finest fringe
  for (size_t p = 0; p < phi1.size(); ++p) {
    combined.valid[p] = phi1.valid[p] && phi2.valid[p] && phi3.valid[p];
    if (!combined.valid[p]) continue;
    double p12 = wrap_to_2pi(phi1.phase.data[p] - phi2.phase.data[p]);
    double p23 = wrap_to_2pi(phi2.phase.data[p] - phi3.phase.data[p]);
    double p123 = wrap_to_2pi(p12 - p23);
    long o12 = std::lround((r12 * p123 - p12) / two_pi);
    double abs12 = p12 + two_pi * static_cast<double>(o12);
    order[p] = std::lround((r1 * abs12 - phi1.phase.data[p]) / two_pi);
  }
  return detail::make_absolute(combined, std::move(order));
}

// Residual of a candidate order pair in normalized position units.
namespace detail {
inline double nt_residual(double phi1, double phi2, int f1, int f2, long k1, long& best_k2) {
  double u1 = (phi1 + two_pi * static_cast<double>(k1)) / f1;
  long k2 = std::lround((f2 * u1 - phi2) / two_pi);
  if (k2 < 0) k2 = 0;
  if (k2 > f2 - 1) k2 = f2 - 1;
  best_k2 = k2;
  double u2 = (phi2 + two_pi * static_cast<double>(k2)) / f2;
  return std::abs(u1 - u2);
}
}  // namespace detail

// Two coprime integer frequencies disambiguate each other: pick the order
// pair whose normalized positions agree best.  Unwraps phi1.
inline AbsolutePhaseMap unwrap_number_theory(const PhaseMap& phi1, const PhaseMap& phi2, int f1,
                                             int f2) {
  detail::require_same_shape(phi1, phi2, "unwrap_number_theory");
  if (f1 < 1 || f2 < 1) throw std::invalid_argument("unwrap_number_theory: frequencies must be positive");
  if (std::gcd(f1, f2) != 1)
    throw std::invalid_argument("unwrap_number_theory: frequencies must be coprime");
  std::vector<long> order(phi1.size(), 0);
  PhaseMap combined = phi1;
  for (size_t p = 0; p < phi1.size(); ++p) {
    combined.valid[p] = phi1.valid[p] && phi2.valid[p];
    if (!combined.valid[p]) continue;
    double best = std::numeric_limits<double>::infinity();
    long best_k1 = 0;
    for (long k1 = 0; k1 < f1; ++k1) {
      long k2 = 0;
      double r = detail::nt_residual(phi1.phase.data[p], phi2.phase.data[p], f1, f2, k1, k2);
      if (r < best) {
        best = r;
        best_k1 = k1;
      }
    }
    order[p] = best_k1;
  }
  return detail::make_absolute(combined, std::move(order));
}

// Reference implementation scanning every (k1, k2) pair; the fast search
// must select identical orders.
inline AbsolutePhaseMap unwrap_number_theory_exhaustive(const PhaseMap& phi1, const PhaseMap& phi2,
                                                        int f1, int f2) {
  detail::require_same_shape(phi1, phi2, "unwrap_number_theory_exhaustive");
  if (f1 < 1 || f2 < 1)
    throw std::invalid_argument("unwrap_number_theory_exhaustive: frequencies must be positive");
  if (std::gcd(f1, f2) != 1)
    throw std::invalid_argument("unwrap_number_theory_exhaustive: frequencies must be coprime");
  std::vector<long> order(phi1.size(), 0);
  PhaseMap combined = phi1;
  for (size_t p = 0; p < phi1.size(); ++p) {
    combined.valid[p] = phi1.valid[p] && phi2.valid[p];
    if (!combined.valid[p]) continue;
    double best = std::numeric_limits<double>::infinity();
    long best_k1 = 0;
    for (long k1 = 0; k1 < f1; ++k1) {
      double u1 = (phi1.phase.data[p] + two_pi * static_cast<double>(k1)) / f1;
      for (long k2 = 0; k2 < f2; ++k2) {
        double u2 = (phi2.phase.data[p] + two_pi * static_cast<double>(k2)) / f2;
        double r = std::abs(u1 - u2);
        if (r < best) {
          best = r;
          best_k1 = k1;
        }
      }
    }
    order[p] = best_k1;
  }
  return detail::make_absolute(combined, std::move(order));
}

// Fraction of pixels that are valid and carry exactly the true order.
inline double success_rate(const AbsolutePhaseMap& result, const std::vector<long>& truth_orders) {
  if (result.size() != truth_orders.size())
    throw std::invalid_argument("success_rate: dimension mismatch");
  if (result.size() == 0) throw std::invalid_argument("success_rate: empty map");
  size_t hit = 0;
  for (size_t p = 0; p < result.size(); ++p)
    if (result.valid[p] && result.order[p] == truth_orders[p]) ++hit;
  return static_cast<double>(hit) / static_cast<double>(result.size());
}

// True fringe orders of a horizontal ramp scene.
inline std::vector<long> truth_orders_ramp(int width, int height, double wavelength, double x0) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("truth_orders_ramp: bad wavelength");
  std::vector<long> out(static_cast<size_t>(width) * height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      out[static_cast<size_t>(y) * width + x] =
          static_cast<long>(std::floor((static_cast<double>(x) + x0) / wavelength));
  return out;
}

// ---- deployment study -------------------------------------------------------

enum class UnwrapMethod { hierarchical, heterodyne3, number_theory };

inline const char* unwrap_method_name(UnwrapMethod m) {
  switch (m) {
    case UnwrapMethod::hierarchical: return "hierarchical";
    case UnwrapMethod::heterodyne3: return "heterodyne3";
    case UnwrapMethod::number_theory: return "number_theory";
  }
  return "?";
}

struct DeploymentConfig {
  int width = 480;
  double v0 = 0.15;
  double a = 0.005;
  double ambient = 0.5;
  double modulation = 0.4;
  double scene_x0 = 0.5;  // sample at pixel centers so no sample sits on an order boundary
  double hier_f_high = 20.0;
  std::array<double, 3> het_wavelengths{22.0, 24.0, 26.0};
  int nt_f1 = 8;  // finest first; the map reported by the study
  int nt_f2 = 7;
};

namespace detail {
// Subtract the circular mean of (estimate - truth) so only the ripple and
// order errors reach the unwrapper; the uniform lag every map shares under
// the common-motion model would otherwise bias all orders together.
inline PhaseMap remove_dc_against(const PhaseMap& est, const Image& truth_wrapped) {
  double s = 0.0, c = 0.0;
  size_t n = 0;
  for (size_t p = 0; p < est.size(); ++p) {
    if (!est.valid[p]) continue;
    double d = est.phase.data[p] - truth_wrapped.data[p];
    s += std::sin(d);
    c += std::cos(d);
    ++n;
  }
  if (n == 0) throw std::runtime_error("remove_dc_against: no valid pixels");
  double dc = std::atan2(s, c);
  PhaseMap out = est;
  for (size_t p = 0; p < est.size(); ++p)
    if (est.valid[p]) out.phase.data[p] = wrap_to_2pi(est.phase.data[p] - dc);
  return out;
}

// Wrapped phase of one frequency stream pulled out of the interleaved
// capture: frames of that frequency, compensated at depth K.  Motion is
// indexed by capture slot, so each stream sees the slot-j offsets.
inline PhaseMap schedule_stream_phase(double wavelength, int freq_index, int F, Method bsc, int K,
                                      const DeploymentConfig& dc, const MotionTrajectory& motion) {
  FringeParams params;
  params.A = dc.ambient;
  params.B = dc.modulation;
  params.steps = 4;
  params.wavelength = wavelength;
  params.width = dc.width;
  params.height = 1;
  Image scene = ramp_phase(params.width, params.height, wavelength, dc.scene_x0);
  int window = method_window(bsc, K);
  std::vector<Image> frames;
  frames.reserve(static_cast<size_t>(window));
  for (int t = 0; t < window; ++t) {
    long slot = freq_index + static_cast<long>(F) * t;
    frames.push_back(synthesize_frame(scene, params, t, motion.at(static_cast<size_t>(slot))));
  }
  PhaseMap est = (bsc == Method::ibsc) ? ibsc(frames, K) : pbsc(frames, 4, K);
  Image truth = ramp_phase(params.width, params.height, wavelength, dc.scene_x0);
  return remove_dc_against(est, truth);
}
}  // namespace detail

// Success rate of one unwrapping method under interleaved capture with
// motion, for each compensation depth in Ks.  bsc selects the phase- or
// intensity-domain variant (depth 0 reduces both to the raw retrieval).
inline std::vector<double> deployment_study(UnwrapMethod method, Method bsc,
                                            const std::vector<int>& Ks,
                                            const DeploymentConfig& cfg = {}) {
  if (bsc == Method::pbsc3)
    throw std::invalid_argument("deployment_study: quarter-period variants only (pbsc4 or ibsc)");
  std::vector<double> srs;
  srs.reserve(Ks.size());
  double W = static_cast<double>(cfg.width);
  for (int K : Ks) {
    if (K < 0) throw std::invalid_argument("deployment_study: negative depth");
    std::vector<double> wavelengths;
    switch (method) {
      case UnwrapMethod::hierarchical:
        wavelengths = {W / cfg.hier_f_high, W};
        break;
      case UnwrapMethod::heterodyne3:
        wavelengths = {cfg.het_wavelengths[0], cfg.het_wavelengths[1], cfg.het_wavelengths[2]};
        break;
      case UnwrapMethod::number_theory:
        wavelengths = {W / cfg.nt_f1, W / cfg.nt_f2};
        break;
    }
    int F = static_cast<int>(wavelengths.size());
    long slots = static_cast<long>(F) * method_window(bsc, K);
    MotionTrajectory motion = MotionTrajectory::kinematic(cfg.v0, cfg.a, static_cast<int>(slots));
    std::vector<PhaseMap> maps;
    maps.reserve(static_cast<size_t>(F));
    for (int q = 0; q < F; ++q)
      maps.push_back(detail::schedule_stream_phase(wavelengths[static_cast<size_t>(q)], q, F, bsc,
                                                   K, cfg, motion));
    AbsolutePhaseMap result;
    double finest = wavelengths[0];
    switch (method) {
      case UnwrapMethod::hierarchical:
        result = unwrap_hierarchical(maps[0], maps[1], cfg.hier_f_high);
        finest = W / cfg.hier_f_high;
        break;
      case UnwrapMethod::heterodyne3:
        result = unwrap_heterodyne3(maps[0], maps[1], maps[2], cfg.het_wavelengths, W);
        finest = cfg.het_wavelengths[0];
        break;
      case UnwrapMethod::number_theory:
        result = unwrap_number_theory(maps[0], maps[1], cfg.nt_f1, cfg.nt_f2);
        finest = W / cfg.nt_f1;
        break;
    }
    srs.push_back(success_rate(result, truth_orders_ramp(cfg.width, 1, finest, cfg.scene_x0)));
  }
  return srs;
}

}  // namespace fringe
