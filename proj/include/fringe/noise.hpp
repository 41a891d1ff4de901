#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fringe/bsc.hpp"
#include "fringe/phase.hpp"
#include "fringe/retrieval.hpp"
#include "fringe/rng.hpp"

namespace fringe {

// Monte-Carlo study of how intensity noise propagates into the retrieved
// phase.  Ambient equals modulation by default so the first-order variance
// law for N-step retrieval is exact rather than approximate.
struct NoiseStudyConfig {
  double gain = 0.02;        // photon-transfer slope, variance per unit intensity
  double background = 0.4;   // ambient level A
  double modulation = 0.4;   // fringe amplitude B
  long trials = 200000;
  uint64_t seed = 777;
  double dark_variance = 0.0;
  double dark_signal = 0.0;

  void validate() const {
    if (gain < 0.0) throw std::invalid_argument("NoiseStudyConfig: negative gain");
    if (!(modulation > 0.0)) throw std::invalid_argument("NoiseStudyConfig: modulation must be positive");
    if (background < modulation)
      throw std::invalid_argument("NoiseStudyConfig: background below modulation gives negative intensity");
    if (trials < 10000) throw std::invalid_argument("NoiseStudyConfig: too few trials for a stable variance");
    if (dark_variance < 0.0) throw std::invalid_argument("NoiseStudyConfig: negative dark variance");
  }
};

struct VarianceEstimate {
  double measured = 0.0;
  double predicted = 0.0;
};

// First-order variance law for plain N-step retrieval.
inline double psp_variance_law(int N, const NoiseStudyConfig& c) {
  return 2.0 * c.gain / (static_cast<double>(N) * c.modulation);
}

// Empirical variance law for compensated retrieval at depth K (N = K+4
// patterns): one inverse square-root power weaker than plain retrieval.
inline double bsc_variance_law(int K, const NoiseStudyConfig& c) {
  return c.gain / (std::sqrt(static_cast<double>(K + 4)) * c.modulation);
}

namespace detail {

// Number of reference phases the estimate is averaged over; the phase
// dependence of the variance is second order, so a ring of phases spanning
// one period removes it.
inline constexpr int noise_phase_count = 8;

inline double noise_reference_phase(int m) {
  return pi / 4.0 + two_pi * static_cast<double>(m) / noise_phase_count;
}

// One noisy intensity window at a single pixel: quarter-period shifts,
// static scene, photon-transfer noise.
inline void noisy_window(double phi0, int count, const NoiseStudyConfig& c, Rng& rng, double* I) {
  for (int n = 0; n < count; ++n) {
    double clean = c.background + c.modulation * std::cos(phi0 - two_pi * n / 4.0);
    double var = c.dark_variance + c.gain * (clean - c.dark_signal);
    I[n] = (var > 0.0) ? clean + std::sqrt(var) * rng.normal() : clean;
  }
}

// Same but with N shifts per period (plain retrieval geometry).
inline void noisy_window_nstep(double phi0, int N, const NoiseStudyConfig& c, Rng& rng, double* I) {
  for (int n = 0; n < N; ++n) {
    double clean = c.background + c.modulation * std::cos(phi0 - two_pi * n / static_cast<double>(N));
    double var = c.dark_variance + c.gain * (clean - c.dark_signal);
    I[n] = (var > 0.0) ? clean + std::sqrt(var) * rng.normal() : clean;
  }
}

inline double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("sample_variance: need at least two samples");
  double mean = 0.0;
  for (double s : v) mean += s;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double s : v) ss += (s - mean) * (s - mean);
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace detail

// Phase-error draws for plain N-step retrieval at one reference phase.
// Trial t always uses substream stream_base + t, so any subset of trials
// is reproducible in isolation.
inline std::vector<double> phase_error_samples_psp(int N, double phi0, long count,
                                                   const NoiseStudyConfig& c,
                                                   uint64_t stream_base = 0) {
  c.validate();
  if (N < 3 || N > 63) throw std::invalid_argument("phase_error_samples_psp: N out of range");
  std::vector<double> errors(static_cast<size_t>(count));
  double I[64];
  for (long t = 0; t < count; ++t) {
    Rng rng(derive_seed(c.seed, stream_base + static_cast<uint64_t>(t)));
    detail::noisy_window_nstep(phi0, N, c, rng, I);
    bool ok = true;
    double est = nstep_pixel(I, N, ok);
    errors[static_cast<size_t>(t)] = ok ? phase_diff_wrapped(est, phi0) : 0.0;
  }
  return errors;
}

// Monte-Carlo wrapped-phase variance of plain N-step retrieval, averaged
// over a ring of reference phases.
inline VarianceEstimate phase_noise_psp(int N, const NoiseStudyConfig& c) {
  c.validate();
  long per_phase = c.trials / detail::noise_phase_count;
  double acc = 0.0;
  for (int m = 0; m < detail::noise_phase_count; ++m) {
    std::vector<double> errors = phase_error_samples_psp(
        N, detail::noise_reference_phase(m), per_phase, c,
        static_cast<uint64_t>(m) * static_cast<uint64_t>(per_phase));
    acc += detail::sample_variance(errors);
  }
  return {acc / detail::noise_phase_count, psp_variance_law(N, c)};
}

// Monte-Carlo wrapped-phase variance of compensated retrieval at depth K.
inline VarianceEstimate phase_noise_bsc(Method method, int K, const NoiseStudyConfig& c) {
  c.validate();
  if (method == Method::pbsc3)
    throw std::invalid_argument("phase_noise_bsc: quarter-period variants only (pbsc4 or ibsc)");
  if (K < 0 || K + 4 > 63) throw std::invalid_argument("phase_noise_bsc: depth out of range");
  std::vector<uint64_t> coeff = binomial_row(K);
  int count = K + 4;
  long per_phase = c.trials / detail::noise_phase_count;
  double I[64];
  NoTally nt;
  double acc = 0.0;
  for (int m = 0; m < detail::noise_phase_count; ++m) {
    double phi0 = detail::noise_reference_phase(m);
    std::vector<double> errors(static_cast<size_t>(per_phase));
    for (long t = 0; t < per_phase; ++t) {
      Rng rng(derive_seed(c.seed, static_cast<uint64_t>(m) * static_cast<uint64_t>(per_phase) +
                                      static_cast<uint64_t>(t)));
      detail::noisy_window(phi0, count, c, rng, I);
      bool ok = true;
      double est = (method == Method::ibsc) ? ibsc_pixel(I, K, 0, coeff.data(), ok, nt)
                                            : pbsc_pixel(I, 4, K, 0, ok, nt);
      errors[static_cast<size_t>(t)] = ok ? phase_diff_wrapped(est, phi0) : 0.0;
    }
    acc += detail::sample_variance(errors);
  }
  return {acc / detail::noise_phase_count, bsc_variance_law(K, c)};
}

// Both compensation variants fed from identical noisy windows, so their
// variances differ only by the algorithms themselves.
inline std::pair<double, double> phase_noise_bsc_paired(int K, const NoiseStudyConfig& c) {
  c.validate();
  if (K < 0 || K + 4 > 63) throw std::invalid_argument("phase_noise_bsc_paired: depth out of range");
  std::vector<uint64_t> coeff = binomial_row(K);
  int count = K + 4;
  long per_phase = c.trials / detail::noise_phase_count;
  double I[64];
  NoTally nt;
  double acc_p = 0.0, acc_i = 0.0;
  for (int m = 0; m < detail::noise_phase_count; ++m) {
    double phi0 = detail::noise_reference_phase(m);
    std::vector<double> err_p(static_cast<size_t>(per_phase)), err_i(static_cast<size_t>(per_phase));
    for (long t = 0; t < per_phase; ++t) {
      Rng rng(derive_seed(c.seed, static_cast<uint64_t>(m) * static_cast<uint64_t>(per_phase) +
                                      static_cast<uint64_t>(t)));
      detail::noisy_window(phi0, count, c, rng, I);
      bool ok_p = true, ok_i = true;
      double est_p = pbsc_pixel(I, 4, K, 0, ok_p, nt);
      double est_i = ibsc_pixel(I, K, 0, coeff.data(), ok_i, nt);
      err_p[static_cast<size_t>(t)] = ok_p ? phase_diff_wrapped(est_p, phi0) : 0.0;
      err_i[static_cast<size_t>(t)] = ok_i ? phase_diff_wrapped(est_i, phi0) : 0.0;
    }
    acc_p += detail::sample_variance(err_p);
    acc_i += detail::sample_variance(err_i);
  }
  return {acc_p / detail::noise_phase_count, acc_i / detail::noise_phase_count};
}

// Least-squares power law sigma2 ~ c * N^p fitted in log-log space.
inline std::pair<double, double> fit_noise_law(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 4) throw std::invalid_argument("fit_noise_law: need at least 4 samples");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [n, v] : samples) {
    if (!(n > 0.0) || !(v > 0.0)) throw std::invalid_argument("fit_noise_law: samples must be positive");
    double lx = std::log(n), ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double m = static_cast<double>(samples.size());
  double p = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double c = std::exp((sy - p * sx) / m);
  return {c, p};
}

}  // namespace fringe
