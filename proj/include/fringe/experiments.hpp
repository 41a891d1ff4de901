#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fringe/bench.hpp"
#include "fringe/bsc.hpp"
#include "fringe/config.hpp"
#include "fringe/csv.hpp"
#include "fringe/image.hpp"
#include "fringe/imaging.hpp"
#include "fringe/noise.hpp"
#include "fringe/oracle.hpp"
#include "fringe/retrieval.hpp"
#include "fringe/unwrap.hpp"

namespace fringe {

// Phase dump schema shared by every command that emits per-pixel phase.
inline void write_phase_csv(const PhaseMap& map, const std::string& path) {
  CsvWriter csv(path, "x,y,phase_rad,valid");
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      size_t p = static_cast<size_t>(y) * map.width() + x;
      csv.row({std::to_string(x), std::to_string(y), fmt_double(map.phase.data[p]),
               std::to_string(map.valid[p] ? 1 : 0)});
    }
}

// Wrapped phase scaled into [0,1) for PGM dumps.
inline Image phase_to_unit(const Image& phase) {
  Image out = phase;
  for (double& v : out.data) v /= two_pi;
  return out;
}

struct RmseRow {
  int K = 0;
  Method method = Method::pbsc4;
  double rmse = 0.0;
  double dc = 0.0;
};

// Ripple RMSE of the compensated phase against the scene truth for depths
// 0..k_max.  The spatial mean of the wrapped error (the motion lag common
// to the whole map) is removed first and reported alongside.
inline std::vector<RmseRow> rmse_curve(const Image& scene, const FringeParams& params,
                                       const MotionTrajectory& motion, const CaptureConfig& capture,
                                       Method method, int k_max) {
  if (k_max < 0) throw std::invalid_argument("rmse_curve: negative depth range");
  if (params.steps != 4)
    throw std::invalid_argument("rmse_curve: compensation methods use quarter-period shifts");
  std::vector<RmseRow> rows;
  rows.reserve(static_cast<size_t>(k_max) + 1);
  for (int K = 0; K <= k_max; ++K) {
    int count = method_window(method, K);
    std::vector<Image> frames = simulate_capture(scene, params, motion, capture, count);
    PhaseMap est = (method == Method::ibsc) ? ibsc(frames, K)
                                            : pbsc(frames, method == Method::pbsc3 ? 3 : 4, K);
    double sum = 0.0;
    size_t n = 0;
    std::vector<double> err(est.size(), 0.0);
    for (size_t p = 0; p < est.size(); ++p) {
      if (!est.valid[p]) continue;
      err[p] = phase_diff_wrapped(est.phase.data[p], scene.data[p]);
      sum += err[p];
      ++n;
    }
    if (n == 0) throw std::runtime_error("rmse_curve: no valid pixels");
    double dc = sum / static_cast<double>(n);
    double ss = 0.0;
    for (size_t p = 0; p < est.size(); ++p)
      if (est.valid[p]) ss += (err[p] - dc) * (err[p] - dc);
    rows.push_back({K, method, std::sqrt(ss / static_cast<double>(n)), dc});
  }
  return rows;
}

// ---- command implementations ------------------------------------------------
// Each command overlays the user's config on its defaults, echoes the
// effective config into the output directory, and writes CSV/PGM results.

namespace detail {

inline void prepare_out_dir(const std::string& out_dir, const Config& effective) {
  std::filesystem::create_directories(out_dir);
  std::ofstream echo(out_dir + "/config_echo.cfg");
  if (!echo) throw std::runtime_error("cannot write config echo in " + out_dir);
  echo << effective.serialize();
}

inline std::vector<long> parse_int_list(const Config& cfg, const std::string& key,
                                        const std::string& fallback) {
  std::string s = cfg.get_string(key, fallback);
  std::vector<long> out;
  std::string cur;
  for (char ch : s + ",") {
    if (ch == ',') {
      if (cur.empty()) continue;
      char* end = nullptr;
      long v = std::strtol(cur.c_str(), &end, 10);
      if (end == cur.c_str() || *end != '\0')
        throw ConfigError("config key '" + key + "': not an integer list: '" + s + "'");
      out.push_back(v);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

inline FringeParams fringe_from(const Config& cfg) {
  FringeParams p;
  p.A = cfg.get_double("fringe.ambient", 0.5);
  p.B = cfg.get_double("fringe.modulation", 0.4);
  p.wavelength = cfg.get_double("fringe.wavelength", 24.0);
  p.steps = 4;
  p.width = static_cast<int>(cfg.get_long("scene.width", 480));
  p.height = static_cast<int>(cfg.get_long("scene.height", 64));
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid fringe/scene config: ") + e.what());
  }
  return p;
}

inline std::vector<Method> methods_from(const Config& cfg, const char* fallback_list) {
  std::string one = cfg.get_string("method", "");
  std::vector<Method> out;
  if (!one.empty()) {
    try {
      out.push_back(method_from_name(one));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    return out;
  }
  std::string s = fallback_list;
  std::string cur;
  for (char ch : s + ",") {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(method_from_name(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  return out;
}

}  // namespace detail

// Ripple-decay curves: RMSE vs depth for each method, once with a linear
// camera and once with a power-law response.
inline void cmd_decay(const Config& user, const std::string& out_dir) {
  Config cfg;
  cfg.set("seed", "12345");
  cfg.set("scene.width", "480");
  cfg.set("scene.height", "64");
  cfg.set("fringe.wavelength", "24");
  cfg.set("fringe.ambient", "0.5");
  cfg.set("fringe.modulation", "0.4");
  cfg.set("motion.v0", "0.25");
  cfg.set("motion.a", "0.01");
  cfg.set("k_max", "6");
  cfg.set("decay.gamma", "1.15");
  cfg.merge(user);
  detail::prepare_out_dir(out_dir, cfg);

  FringeParams params = detail::fringe_from(cfg);
  Image scene = make_ramp_scene(params);
  int k_max = static_cast<int>(cfg.get_long("k_max", 6));
  double v0 = cfg.get_double("motion.v0", 0.25);
  double a = cfg.get_double("motion.a", 0.01);
  double gamma_alt = cfg.get_double("decay.gamma", 1.15);
  MotionTrajectory motion = MotionTrajectory::kinematic(v0, a, k_max + 4);
  std::vector<Method> methods = detail::methods_from(cfg, "pbsc4,ibsc");

  for (Method m : methods) {
    for (int variant = 0; variant < 2; ++variant) {
      CaptureConfig capture;
      capture.gamma = variant ? gamma_alt : 1.0;
      capture.seed = cfg.get_u64("seed", 12345);
      std::vector<RmseRow> rows = rmse_curve(scene, params, motion, capture, m, k_max);
      std::string path = out_dir + "/decay_" + method_name(m) + (variant ? "_gamma" : "_linear") + ".csv";
      CsvWriter csv(path, "K,method,rmse_rad,dc_rad");
      for (const RmseRow& r : rows)
        csv.row({std::to_string(r.K), method_name(r.method), fmt_double(r.rmse), fmt_double(r.dc)});
      std::cout << path << ": rmse K=0 " << fmt_double(rows.front().rmse) << " -> K=" << k_max
                << " " << fmt_double(rows.back().rmse) << "\n";
    }
  }
}

// Unwrapping success-rate table under interleaved capture with motion.
inline void cmd_unwrap_sr(const Config& user, const std::string& out_dir) {
  Config cfg;
  cfg.set("seed", "12345");
  cfg.set("unwrap.width", "480");
  cfg.set("fringe.ambient", "0.5");
  cfg.set("fringe.modulation", "0.4");
  cfg.set("motion.v0", "0.15");
  cfg.set("motion.a", "0.005");
  cfg.set("k_max", "4");
  cfg.set("unwrap.hier_f", "20");
  cfg.set("unwrap.het_l1", "22");
  cfg.set("unwrap.het_l2", "24");
  cfg.set("unwrap.het_l3", "26");
  cfg.set("unwrap.nt_f1", "8");
  cfg.set("unwrap.nt_f2", "7");
  cfg.set("unwrap.scene_x0", "0.5");
  cfg.merge(user);
  detail::prepare_out_dir(out_dir, cfg);

  DeploymentConfig dc;
  dc.width = static_cast<int>(cfg.get_long("unwrap.width", 480));
  dc.ambient = cfg.get_double("fringe.ambient", 0.5);
  dc.modulation = cfg.get_double("fringe.modulation", 0.4);
  dc.v0 = cfg.get_double("motion.v0", 0.15);
  dc.a = cfg.get_double("motion.a", 0.005);
  dc.scene_x0 = cfg.get_double("unwrap.scene_x0", 0.5);
  dc.hier_f_high = cfg.get_double("unwrap.hier_f", 20);
  dc.het_wavelengths = {cfg.get_double("unwrap.het_l1", 22), cfg.get_double("unwrap.het_l2", 24),
                        cfg.get_double("unwrap.het_l3", 26)};
  dc.nt_f1 = static_cast<int>(cfg.get_long("unwrap.nt_f1", 8));
  dc.nt_f2 = static_cast<int>(cfg.get_long("unwrap.nt_f2", 7));
  int k_max = static_cast<int>(cfg.get_long("k_max", 4));
  std::vector<int> Ks;
  for (int K = 0; K <= k_max; ++K) Ks.push_back(K);

  CsvWriter csv(out_dir + "/unwrap_sr.csv", "method,bsc,K,success_rate");
  for (UnwrapMethod um :
       {UnwrapMethod::hierarchical, UnwrapMethod::heterodyne3, UnwrapMethod::number_theory}) {
    for (Method bsc : {Method::pbsc4, Method::ibsc}) {
      std::vector<double> srs = deployment_study(um, bsc, Ks, dc);
      for (size_t i = 0; i < Ks.size(); ++i)
        csv.row({unwrap_method_name(um), method_name(bsc), std::to_string(Ks[i]),
                 fmt_fixed(srs[i], 6)});
      std::cout << unwrap_method_name(um) << "/" << method_name(bsc) << ": SR(K=0) "
                << fmt_fixed(srs.front(), 4) << " -> SR(K=" << k_max << ") "
                << fmt_fixed(srs.back(), 4) << "\n";
    }
  }
}

// Monte-Carlo noise propagation: measured vs predicted variance, plus
// power-law fits.
inline void cmd_noise(const Config& user, const std::string& out_dir) {
  Config cfg;
  cfg.set("seed", "777");
  cfg.set("noise.gain", "0.02");
  cfg.set("noise.background", "0.4");
  cfg.set("noise.modulation", "0.4");
  cfg.set("noise.trials", "200000");
  cfg.set("noise.psp_n", "4,8,12,16");
  cfg.set("noise.bsc_k", "0,2,4,6,8,12,16");
  cfg.merge(user);
  detail::prepare_out_dir(out_dir, cfg);

  NoiseStudyConfig nc;
  nc.gain = cfg.get_double("noise.gain", 0.02);
  nc.background = cfg.get_double("noise.background", 0.4);
  nc.modulation = cfg.get_double("noise.modulation", 0.4);
  nc.trials = cfg.get_long("noise.trials", 200000);
  nc.seed = cfg.get_u64("seed", 777);
  try {
    nc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid noise config: ") + e.what());
  }

  CsvWriter csv(out_dir + "/noise.csv", "N,method,sigma2_measured,sigma2_predicted");
  std::vector<std::pair<double, double>> psp_pts, pbsc_pts, ibsc_pts;
  for (long N : detail::parse_int_list(cfg, "noise.psp_n", "4,8,12,16")) {
    VarianceEstimate e = phase_noise_psp(static_cast<int>(N), nc);
    csv.row({std::to_string(N), "psp", fmt_double(e.measured), fmt_double(e.predicted)});
    psp_pts.emplace_back(static_cast<double>(N), e.measured);
  }
  for (long K : detail::parse_int_list(cfg, "noise.bsc_k", "0,2,4,6,8,12,16")) {
    VarianceEstimate ep = phase_noise_bsc(Method::pbsc4, static_cast<int>(K), nc);
    VarianceEstimate ei = phase_noise_bsc(Method::ibsc, static_cast<int>(K), nc);
    csv.row({std::to_string(K + 4), "pbsc4", fmt_double(ep.measured), fmt_double(ep.predicted)});
    csv.row({std::to_string(K + 4), "ibsc", fmt_double(ei.measured), fmt_double(ei.predicted)});
    pbsc_pts.emplace_back(static_cast<double>(K + 4), ep.measured);
    ibsc_pts.emplace_back(static_cast<double>(K + 4), ei.measured);
  }

  std::ofstream fit(out_dir + "/noise_fit.txt");
  if (!fit) throw std::runtime_error("cannot write noise_fit.txt");
  auto report = [&](const char* name, const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 4 || nc.gain == 0.0) {
      fit << name << ": fit skipped (need >= 4 positive samples)\n";
      return;
    }
    auto [c, p] = fit_noise_law(pts);
    fit << name << ": sigma2 = " << fmt_double(c) << " * N^" << fmt_double(p) << "\n";
    std::cout << name << " exponent " << fmt_double(p) << "\n";
  };
  report("psp", psp_pts);
  report("pbsc4", pbsc_pts);
  report("ibsc", ibsc_pts);
}

// Cost-model counts and wall-clock throughput per depth.
inline void cmd_bench(const Config& user, const std::string& out_dir) {
  Config cfg;
  cfg.set("seed", "12345");
  cfg.set("bench.width", "640");
  cfg.set("bench.height", "480");
  cfg.set("bench.reps", "100");
  cfg.set("k_max", "15");
  cfg.merge(user);
  detail::prepare_out_dir(out_dir, cfg);

  int w = static_cast<int>(cfg.get_long("bench.width", 640));
  int h = static_cast<int>(cfg.get_long("bench.height", 480));
  int reps = static_cast<int>(cfg.get_long("bench.reps", 100));
  int k_max = static_cast<int>(cfg.get_long("k_max", 15));
  std::vector<Method> methods = detail::methods_from(cfg, "pbsc4,ibsc");

  CsvWriter csv(out_dir + "/bench.csv", "method,K,arctan,mod,addsub,muldiv,cmp,fps");
  std::vector<BenchRow> rows = bench_table(methods, k_max, w, h, reps);
  for (const BenchRow& r : rows)
    csv.row({method_name(r.method), std::to_string(r.K), std::to_string(r.ops.arctan),
             std::to_string(r.ops.mod), std::to_string(r.ops.addsub), std::to_string(r.ops.muldiv),
             std::to_string(r.ops.cmp), fmt_fixed(r.fps, 3)});
  for (Method m : methods) {
    double first = 0.0, last = 0.0;
    for (const BenchRow& r : rows)
      if (r.method == m) {
        if (r.K == 0) first = r.fps;
        if (r.K == k_max) last = r.fps;
      }
    std::cout << method_name(m) << ": fps K=0 " << fmt_fixed(first, 1) << " -> K=" << k_max << " "
              << fmt_fixed(last, 1) << "\n";
  }
}

// Sliding-window streaming demo: per-frame phase dumps and latency stats.
inline void cmd_stream_demo(const Config& user, const std::string& out_dir) {
  Config cfg;
  cfg.set("seed", "12345");
  cfg.set("scene.width", "480");
  cfg.set("scene.height", "64");
  cfg.set("fringe.wavelength", "24");
  cfg.set("fringe.ambient", "0.5");
  cfg.set("fringe.modulation", "0.4");
  cfg.set("motion.v0", "0.15");
  cfg.set("motion.a", "0.005");
  cfg.set("stream.frames", "100");
  cfg.set("stream.k", "4");
  cfg.set("method", "ibsc");
  cfg.merge(user);
  detail::prepare_out_dir(out_dir, cfg);

  FringeParams params = detail::fringe_from(cfg);
  Image scene = make_ramp_scene(params);
  int total = static_cast<int>(cfg.get_long("stream.frames", 100));
  int K = static_cast<int>(cfg.get_long("stream.k", cfg.get_long("k_max", 4)));
  Method method;
  try {
    method = method_from_name(cfg.get_string("method", "ibsc"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  MotionTrajectory motion = MotionTrajectory::kinematic(cfg.get_double("motion.v0", 0.15),
                                                        cfg.get_double("motion.a", 0.005), total);
  CaptureConfig capture;
  capture.seed = cfg.get_u64("seed", 12345);
  if (total < method_window(method, K))
    throw ConfigError("stream.frames shorter than the compensation window");
  std::vector<Image> frames = simulate_capture(scene, params, motion, capture, total);

  SlidingStream stream(method, K);
  CsvWriter latency(out_dir + "/latency.csv", "frame,ms");
  PhaseMap last_map;
  std::vector<double> ms_all;
  for (int i = 0; i < total; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    std::optional<PhaseMap> map = stream.push(frames[static_cast<size_t>(i)]);
    auto t1 = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    latency.row({std::to_string(i), fmt_fixed(ms, 4)});
    if (map) {
      ms_all.push_back(ms);
      char name[64];
      std::snprintf(name, sizeof name, "/phase_%03d.pgm", i);
      write_pgm16(phase_to_unit(map->phase), out_dir + name);
      last_map = std::move(*map);
    }
  }

  // The final window recomputed in batch must match the last streamed map
  // bit for bit; both run the same kernel on the same frames.
  std::vector<Image> tail(frames.end() - stream.window_size(), frames.end());
  long t0_abs = total - stream.window_size();
  PhaseMap batch = (method == Method::ibsc) ? ibsc(tail, K, t0_abs)
                                            : pbsc(tail, method == Method::pbsc3 ? 3 : 4, K, t0_abs);
  for (size_t p = 0; p < batch.size(); ++p)
    if (batch.phase.data[p] != last_map.phase.data[p] || batch.valid[p] != last_map.valid[p])
      throw std::runtime_error("stream/batch mismatch");
  write_phase_csv(last_map, out_dir + "/phase_final.csv");

  std::sort(ms_all.begin(), ms_all.end());
  double mean = 0.0;
  for (double v : ms_all) mean += v;
  mean /= static_cast<double>(ms_all.size());
  double median = ms_all[ms_all.size() / 2];
  std::cout << "emitted " << stream.maps_emitted() << " maps from " << total << " frames (warm-up "
            << stream.warmup() << ")\n";
  std::cout << "latency ms: mean " << fmt_fixed(mean, 3) << ", median " << fmt_fixed(median, 3)
            << ", max " << fmt_fixed(ms_all.back(), 3) << "\n";
  std::cout << "stream/batch equality: OK (bit-identical)\n";
}

}  // namespace fringe
