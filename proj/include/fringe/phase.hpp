#pragma once

#include <cmath>

namespace fringe {

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

// Fold an angle into the principal interval [0, 2*pi).
inline double wrap_to_2pi(double a) {
  double r = std::fmod(a, two_pi);
  if (r < 0.0) r += two_pi;
  return r;
}

// Fold a signed difference into (-pi, pi]; the +pi boundary is kept positive.
inline double wrap_to_pi(double d) {
  double r = std::fmod(d + pi, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - pi;
}

// Shortest signed angular distance a - b.
inline double phase_diff_wrapped(double a, double b) {
  return wrap_to_pi(a - b);
}

}  // namespace fringe
