#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fringe/bsc.hpp"
#include "fringe/imaging.hpp"
#include "fringe/ops.hpp"
#include "fringe/retrieval.hpp"

namespace fringe {

// Cost-model counts for one pixel at depth K, taken by running the actual
// kernel over a synthetic window with the recording policy.  The charge
// points are value-independent, so any valid window gives the same counts.
inline OpCounts count_ops(Method method, int K) {
  if (K < 0 || K > max_binomial_row) throw std::invalid_argument("count_ops: depth out of range");
  int window = method_window(method, K);
  std::vector<double> I(static_cast<size_t>(window));
  for (int t = 0; t < window; ++t) I[static_cast<size_t>(t)] = 0.5 + 0.4 * std::cos(1.0 - t * (pi / 2.0));
  Tally tally;
  bool ok = true;
  switch (method) {
    case Method::pbsc3:
      pbsc_pixel(I.data(), 3, K, 0, ok, tally);
      break;
    case Method::pbsc4:
      pbsc_pixel(I.data(), 4, K, 0, ok, tally);
      break;
    case Method::ibsc: {
      std::vector<uint64_t> coeff = binomial_row(K);
      ibsc_pixel(I.data(), K, 0, coeff.data(), ok, tally);
      break;
    }
  }
  if (!ok) throw std::runtime_error("count_ops: synthetic window flagged invalid");
  return tally.counts;
}

// Closed forms the recorded counts must reproduce for the two
// quarter-period methods.
inline OpCounts expected_ops(Method method, int K) {
  OpCounts c;
  long long k = K;
  if (method == Method::ibsc) {
    c.arctan = 1;
    c.mod = 0;
    c.addsub = 4 * k + 2;
    c.muldiv = 4 * k;
    c.cmp = 0;
    return c;
  }
  if (method == Method::pbsc4) {
    c.arctan = k + 1;
    c.mod = (k + 2) * (k + 1) / 2;       // (0.5K + 1)(K + 1)
    c.addsub = (k + 8) * (k + 1) / 2;    // (0.5K + 4)(K + 1)
    c.muldiv = k * (k + 1);
    c.cmp = k * (k + 1) / 2;
    return c;
  }
  throw std::invalid_argument("expected_ops: closed forms cover pbsc4 and ibsc");
}

// Median wall-clock throughput of the full-raster routine, frames per
// second, with one untimed warm-up run.
inline double throughput_fps(Method method, int K, int width, int height, int repetitions) {
  if (repetitions < 1) throw std::invalid_argument("throughput_fps: need at least one repetition");
  if (K < 0 || K > max_binomial_row) throw std::invalid_argument("throughput_fps: depth out of range");
  FringeParams params;
  params.width = width;
  params.height = height;
  params.validate();
  Image scene = make_ramp_scene(params);
  int window = method_window(method, K);
  std::vector<Image> frames;
  frames.reserve(static_cast<size_t>(window));
  for (int t = 0; t < window; ++t)
    frames.push_back(synthesize_frame(scene, params, t, 0.001 * t));

  auto run = [&]() {
    if (method == Method::ibsc) return ibsc(frames, K);
    return pbsc(frames, method == Method::pbsc3 ? 3 : 4, K);
  };
  volatile double sink = run().phase.data[0];  // warm-up, result kept alive
  std::vector<double> fps(static_cast<size_t>(repetitions));
  for (int r = 0; r < repetitions; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    PhaseMap m = run();
    auto t1 = std::chrono::steady_clock::now();
    sink = m.phase.data[0];
    double dt = std::chrono::duration<double>(t1 - t0).count();
    fps[static_cast<size_t>(r)] = 1.0 / dt;
  }
  (void)sink;
  std::sort(fps.begin(), fps.end());
  size_t n = fps.size();
  return (n % 2 == 1) ? fps[n / 2] : 0.5 * (fps[n / 2 - 1] + fps[n / 2]);
}

struct BenchRow {
  Method method;
  int K = 0;
  OpCounts ops;
  double fps = 0.0;
};

inline std::vector<BenchRow> bench_table(const std::vector<Method>& methods, int k_max, int width,
                                         int height, int repetitions) {
  std::vector<BenchRow> rows;
  for (Method m : methods)
    for (int K = 0; K <= k_max; ++K)
      rows.push_back({m, K, count_ops(m, K), throughput_fps(m, K, width, height, repetitions)});
  return rows;
}

}  // namespace fringe
