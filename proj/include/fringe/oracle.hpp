#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fringe/bsc.hpp"
#include "fringe/phase.hpp"

namespace fringe {

// First-order analytic predictions of the phase error caused by a motion
// trajectory x (one phase offset per absolute frame index).  All ripple
// terms oscillate at twice the carrier phase; each predictor reports the
// constant part and the quadrature amplitudes separately so callers can
// evaluate the error at any carrier phase.

// K-th forward difference of x at index i.  Evaluated both from the
// closed-form alternating sum and by building the difference table; the
// two must agree to 1e-12 or the call refuses to return a value.
inline double diff_k(const std::vector<double>& x, int K, int i) {
  if (K < 0 || i < 0) throw std::invalid_argument("diff_k: negative argument");
  if (K > max_binomial_row) throw std::invalid_argument("diff_k: order too large");
  if (static_cast<size_t>(i) + static_cast<size_t>(K) >= x.size())
    throw std::out_of_range("diff_k: window exceeds trajectory");
  std::vector<uint64_t> c = binomial_row(K);
  double closed = 0.0;
  for (int k = 0; k <= K; ++k) {
    double term = static_cast<double>(c[static_cast<size_t>(k)]) * x[static_cast<size_t>(i + K - k)];
    closed += (k % 2 == 0) ? term : -term;
  }
  std::vector<double> table(x.begin() + i, x.begin() + i + K + 1);
  for (int level = 0; level < K; ++level)
    for (int j = 0; j + level < K; ++j)
      table[static_cast<size_t>(j)] = table[static_cast<size_t>(j) + 1] - table[static_cast<size_t>(j)];
  double tabulated = table[0];
  if (std::abs(closed - tabulated) > 1e-12 * std::max(1.0, std::abs(closed)))
    throw std::runtime_error("diff_k: closed form and difference table disagree");
  return closed;
}

// Motion error of plain N-step retrieval with the window starting at
// absolute frame i; phi gives the true per-frame carrier phase at every
// absolute index the window touches.
inline double predict_error_nstep(const std::vector<double>& x, const std::vector<double>& phi,
                                  int i, int N) {
  if (N < 3) throw std::invalid_argument("predict_error_nstep: need at least 3 steps");
  if (i < 0) throw std::invalid_argument("predict_error_nstep: negative index");
  if (x.size() < static_cast<size_t>(i + N) || phi.size() < static_cast<size_t>(i + N))
    throw std::out_of_range("predict_error_nstep: window exceeds inputs");
  double e = 0.0;
  for (int n = 0; n < N; ++n) {
    size_t j = static_cast<size_t>(i + n);
    e += x[j] * (1.0 - std::cos(2.0 * phi[j]));
  }
  return e / N;
}

// Same error for the quarter-period 4-step case, expressed against the
// carrier phase phi_i at the window start.
inline double predict_error_4step(const std::vector<double>& x, int i, double phi_i) {
  if (i < 0) throw std::invalid_argument("predict_error_4step: negative index");
  if (x.size() < static_cast<size_t>(i + 4))
    throw std::out_of_range("predict_error_4step: window exceeds trajectory");
  double sum = 0.0, alt = 0.0;
  for (int n = 0; n < 4; ++n) {
    double v = x[static_cast<size_t>(i + n)];
    sum += v;
    alt += (n % 2 == 0) ? v : -v;
  }
  return 0.25 * (sum - alt * std::cos(2.0 * phi_i));
}

// Residual error after compensation: dc + cos_amp*cos(2*phi) + sin_amp*sin(2*phi),
// with phi the true carrier phase at the window-start datum.
struct ErrorPrediction {
  double dc = 0.0;
  double cos_amp = 0.0;
  double sin_amp = 0.0;
  bool dc_known = true;  // false where no closed form for the constant part exists

  double ripple(double phi) const {
    return cos_amp * std::cos(2.0 * phi) + sin_amp * std::sin(2.0 * phi);
  }
  double eval(double phi) const { return dc + ripple(phi); }
};

namespace detail {
inline double pow2neg(int e) { return std::ldexp(1.0, -e); }
}

// Phase-domain compensation on 4-step windows, depth K, window start i.
inline ErrorPrediction predict_residual_pbsc4(const std::vector<double>& x, int i, int K) {
  if (K < 0 || i < 0) throw std::invalid_argument("predict_residual_pbsc4: negative argument");
  ErrorPrediction p;
  double scale = detail::pow2neg(K + 2);
  p.cos_amp = scale * (diff_k(x, K + 1, i) + diff_k(x, K + 1, i + 2));
  std::vector<uint64_t> c = binomial_row(K);
  double dc = 0.0;
  for (int k = 0; k <= K; ++k) {
    double w = static_cast<double>(c[static_cast<size_t>(k)]);
    for (int n = 0; n < 4; ++n) {
      size_t j = static_cast<size_t>(i + k + n);
      if (j >= x.size()) throw std::out_of_range("predict_residual_pbsc4: window exceeds trajectory");
      dc += w * x[j];
    }
  }
  p.dc = scale * dc;
  return p;
}

// Phase-domain compensation on 3-step windows.  The constant part has no
// closed form here, so only the ripple is predicted.
inline ErrorPrediction predict_residual_pbsc3(const std::vector<double>& x, int i, int K) {
  if (K < 0 || i < 0) throw std::invalid_argument("predict_residual_pbsc3: negative argument");
  ErrorPrediction p;
  double scale = detail::pow2neg(K + 2);
  p.cos_amp = -scale * diff_k(x, K + 2, i + 2);
  p.sin_amp = scale * (diff_k(x, K + 1, i + 2) + diff_k(x, K + 1, i + 1));
  p.dc_known = false;
  return p;
}

// Intensity-domain compensation, window start i.
inline ErrorPrediction predict_residual_ibsc(const std::vector<double>& x, int i, int K) {
  if (K < 0 || i < 0) throw std::invalid_argument("predict_residual_ibsc: negative argument");
  ErrorPrediction p;
  double scale = detail::pow2neg(K + 2);
  double amp = diff_k(x, K + 1, i) + diff_k(x, K + 1, i + 2);
  p.cos_amp = (K % 2 == 0) ? scale * amp : -scale * amp;
  std::vector<uint64_t> c = binomial_row(K);
  double dc = 0.0;
  for (int k = 0; k <= K; ++k) {
    double w = static_cast<double>(c[static_cast<size_t>(k)]);
    for (int m = 0; m < 4; ++m) {
      size_t j = static_cast<size_t>(i + ibsc_index(m, k));
      if (j >= x.size()) throw std::out_of_range("predict_residual_ibsc: window exceeds trajectory");
      dc += w * x[j];
    }
  }
  p.dc = scale * dc;
  return p;
}

// Ripple amplitude of the intensity-domain method summed sample by sample
// over the weighted window, without collapsing to forward differences.
// Must agree with predict_residual_ibsc's cos_amp identically.
inline double ibsc_ripple_direct(const std::vector<double>& x, int i, int K) {
  if (K < 0 || i < 0) throw std::invalid_argument("ibsc_ripple_direct: negative argument");
  std::vector<uint64_t> c = binomial_row(K);
  double amp = 0.0;
  for (int k = 0; k <= K; ++k) {
    double w = static_cast<double>(c[static_cast<size_t>(k)]);
    double g = 0.0;
    for (int m = 0; m < 4; ++m) {
      size_t j = static_cast<size_t>(i + ibsc_index(m, k));
      if (j >= x.size()) throw std::out_of_range("ibsc_ripple_direct: window exceeds trajectory");
      g += (m % 2 == 0) ? -x[j] : x[j];
    }
    amp += w * g;
  }
  return detail::pow2neg(K + 2) * amp;
}

}  // namespace fringe
