#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fringe/image.hpp"
#include "fringe/phase.hpp"
#include "fringe/rng.hpp"

namespace fringe {

// Projected fringe geometry and photometry.  A is the ambient offset, B the
// modulation amplitude, both in normalized intensity units.
struct FringeParams {
  double A = 0.5;
  double B = 0.4;
  int steps = 4;         // phase shifts per period
  double wavelength = 24.0;  // fringe period in pixels along x
  int width = 480;
  int height = 64;

  void validate() const {
    if (!(A - B >= 0.0)) throw std::invalid_argument("FringeParams: need A - B >= 0");
    if (!(A + B <= 1.0)) throw std::invalid_argument("FringeParams: need A + B <= 1");
    if (steps < 3) throw std::invalid_argument("FringeParams: need at least 3 steps");
    if (!(wavelength > 0.0)) throw std::invalid_argument("FringeParams: wavelength must be positive");
    if (width <= 0 || height <= 0) throw std::invalid_argument("FringeParams: bad raster size");
  }
};

// Object motion expressed as the per-frame phase offset x_i (radians) it
// imprints on the carrier.
class MotionTrajectory {
 public:
  MotionTrajectory() = default;
  explicit MotionTrajectory(std::vector<double> samples) : x_(std::move(samples)) {}

  // x_i = v0*i + a*i^2/2 with the frame interval as the time unit.
  static MotionTrajectory kinematic(double v0, double a, int count) {
    if (count < 0) throw std::invalid_argument("MotionTrajectory: negative count");
    std::vector<double> x(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
      double t = static_cast<double>(i);
      x[static_cast<size_t>(i)] = v0 * t + 0.5 * a * t * t;
    }
    return MotionTrajectory(std::move(x));
  }

  static MotionTrajectory statically() { return MotionTrajectory(); }

  double at(size_t i) const {
    if (x_.empty()) return 0.0;  // static scene
    if (i >= x_.size()) throw std::out_of_range("MotionTrajectory: index past end");
    return x_[i];
  }

  size_t size() const { return x_.size(); }
  bool is_static() const { return x_.empty(); }
  const std::vector<double>& samples() const { return x_; }

 private:
  std::vector<double> x_;
};

// Camera transfer: gamma, then additive Gaussian noise whose variance
// follows the photon-transfer line var = dark_variance + gain*(I - dark_signal).
struct CaptureConfig {
  double gamma = 1.0;
  double gain = 0.0;
  double dark_signal = 0.0;
  double dark_variance = 0.0;
  uint64_t seed = 0;

  void validate() const {
    if (!(gamma >= 1.0)) throw std::invalid_argument("CaptureConfig: gamma must be >= 1");
    if (gain < 0.0) throw std::invalid_argument("CaptureConfig: negative gain");
    if (dark_variance < 0.0) throw std::invalid_argument("CaptureConfig: negative dark variance");
  }
};

// Reference phase of a horizontal ramp: phi(x) = 2*pi*(x + x0)/wavelength,
// folded into [0, 2*pi); rows are identical.
inline Image ramp_phase(int width, int height, double wavelength, double x0 = 0.0) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("ramp_phase: wavelength must be positive");
  Image img(width, height);
  for (int x = 0; x < width; ++x) {
    double p = wrap_to_2pi(two_pi * (static_cast<double>(x) + x0) / wavelength);
    for (int y = 0; y < height; ++y) img.at(x, y) = p;
  }
  return img;
}

// Same ramp without folding; used as unwrapping ground truth.
inline Image ramp_phase_absolute(int width, int height, double wavelength, double x0 = 0.0) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("ramp_phase_absolute: wavelength must be positive");
  Image img(width, height);
  for (int x = 0; x < width; ++x) {
    double p = two_pi * (static_cast<double>(x) + x0) / wavelength;
    for (int y = 0; y < height; ++y) img.at(x, y) = p;
  }
  return img;
}

inline Image make_ramp_scene(const FringeParams& params) {
  params.validate();
  return ramp_phase(params.width, params.height, params.wavelength);
}

// One ideal frame: I = A + B*cos(phi0 - 2*pi*i/N + x_i).  i is the absolute
// frame index; x_i the motion phase offset at capture time.
inline Image synthesize_frame(const Image& scene_phase, const FringeParams& params,
                              long frame_index, double x_i) {
  params.validate();
  if (scene_phase.width <= 0 || scene_phase.height <= 0)
    throw std::invalid_argument("synthesize_frame: empty scene");
  double shift = two_pi * static_cast<double>(frame_index) / params.steps;
  Image out(scene_phase.width, scene_phase.height);
  for (size_t p = 0; p < out.size(); ++p)
    out.data[p] = params.A + params.B * std::cos(scene_phase.data[p] - shift + x_i);
  return out;
}

// Power-law response on normalized intensities.  gamma = 1 is an exact
// identity; negative inputs are rejected.
inline Image apply_gamma(const Image& frame, double gamma) {
  if (!(gamma >= 1.0)) throw std::invalid_argument("apply_gamma: gamma must be >= 1");
  if (gamma == 1.0) return frame;
  Image out = frame;
  for (double& v : out.data) {
    if (v < 0.0) throw std::domain_error("apply_gamma: negative intensity");
    v = std::pow(v, gamma);
  }
  return out;
}

// Additive Gaussian noise per the photon-transfer line.  Each row draws
// from its own substream so results do not depend on raster traversal
// order; frame_tag separates frames of a sequence.
inline Image add_noise(const Image& frame, const CaptureConfig& config, uint64_t frame_tag = 0) {
  config.validate();
  if (config.gain == 0.0 && config.dark_variance == 0.0) return frame;
  Image out = frame;
  uint64_t frame_seed = derive_seed(config.seed, frame_tag);
  for (int y = 0; y < out.height; ++y) {
    Rng rng(derive_seed(frame_seed, static_cast<uint64_t>(y)));
    for (int x = 0; x < out.width; ++x) {
      double v = out.at(x, y);
      double var = config.dark_variance + config.gain * (v - config.dark_signal);
      if (var > 0.0) out.at(x, y) = v + std::sqrt(var) * rng.normal();
    }
  }
  return out;
}

// Full acquisition chain for `count` frames starting at absolute index 0:
// ideal fringe -> gamma -> noise.
inline std::vector<Image> simulate_capture(const Image& scene_phase, const FringeParams& params,
                                           const MotionTrajectory& motion,
                                           const CaptureConfig& config, int count) {
  params.validate();
  config.validate();
  if (count < params.steps)
    throw std::invalid_argument("simulate_capture: need at least one full shift cycle");
  if (!motion.is_static() && motion.size() < static_cast<size_t>(count))
    throw std::invalid_argument("simulate_capture: trajectory shorter than capture");
  std::vector<Image> frames;
  frames.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    Image f = synthesize_frame(scene_phase, params, i, motion.at(static_cast<size_t>(i)));
    f = apply_gamma(f, config.gamma);
    frames.push_back(add_noise(f, config, static_cast<uint64_t>(i)));
  }
  return frames;
}

}  // namespace fringe
