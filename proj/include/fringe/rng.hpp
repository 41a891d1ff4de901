#pragma once

#include <cmath>
#include <cstdint>

#include "fringe/phase.hpp"

namespace fringe {

namespace detail {
// SplitMix64 output stage.
inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Deterministic child seed for a numbered substream (row, frame, trial...).
// Pure function of (master, stream), so runs are reproducible regardless of
// draw order elsewhere.
inline uint64_t derive_seed(uint64_t master, uint64_t stream) {
  return detail::mix64(master + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

// SplitMix64 generator with a Box-Muller normal variate.  Small and fully
// portable; identical sequences on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return detail::mix64(state_);
  }

  // Uniform on (0, 1]; never returns 0 so it is safe under log().
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; always consumes exactly two uniforms
  // and discards the sine branch (no cached state).
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  uint64_t state_;
};

}  // namespace fringe
