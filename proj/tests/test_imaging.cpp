#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fringe/image.hpp"
#include "fringe/imaging.hpp"
#include "fringe/rng.hpp"

using namespace fringe;

namespace {
std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("ramp scene: single period across the image") {
  FringeParams p;
  p.width = 480;
  p.height = 4;
  p.wavelength = 480.0;
  Image s = make_ramp_scene(p);
  CHECK(s.at(0, 0) == 0.0);
  CHECK(s.at(240, 2) == Catch::Approx(pi).margin(1e-12));
  for (double v : s.data) {
    CHECK(v >= 0.0);
    CHECK(v < two_pi);
  }
}

TEST_CASE("ramp scene: 24 px wavelength gives 20 periods over 480") {
  FringeParams p;
  p.width = 480;
  p.height = 1;
  p.wavelength = 24.0;
  Image s = make_ramp_scene(p);
  for (int x = 0; x + 24 < 480; ++x)
    CHECK(std::abs(phase_diff_wrapped(s.at(x + 24, 0), s.at(x, 0))) < 1e-9);
  CHECK(s.at(24, 0) == Catch::Approx(0.0).margin(1e-9));  // x = wavelength wraps to 0
}

TEST_CASE("ramp scene: non-positive wavelength rejected") {
  CHECK_THROWS_AS(ramp_phase(8, 8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ramp_phase(8, 8, -3.0), std::invalid_argument);
}

TEST_CASE("synthesize_frame matches the scalar intensity model") {
  FringeParams p;  // A = 0.5, B = 0.4, steps = 4
  p.width = 3;
  p.height = 1;
  p.wavelength = 24.0;
  Image scene(3, 1, 0.0);

  Image f0 = synthesize_frame(scene, p, 0, 0.0);
  CHECK(f0.at(0, 0) == Catch::Approx(0.9).margin(1e-15));  // cos(0) = 1

  Image f1 = synthesize_frame(scene, p, 1, 0.0);
  CHECK(f1.at(0, 0) == Catch::Approx(0.5).margin(1e-12));  // quadrature zero

  Image scene2(3, 1, pi / 3.0);
  Image f2 = synthesize_frame(scene2, p, 2, 0.01);
  double expect = 0.5 + 0.4 * std::cos(pi / 3.0 - pi + 0.01);
  CHECK(f2.at(1, 0) == Catch::Approx(expect).margin(1e-15));
}

TEST_CASE("synthesize_frame range and pixel independence") {
  FringeParams p;
  p.width = 64;
  p.height = 4;
  Image scene = make_ramp_scene(p);
  Image f = synthesize_frame(scene, p, 3, 0.2);
  for (double v : f.data) {
    CHECK(v >= p.A - p.B - 1e-15);
    CHECK(v <= p.A + p.B + 1e-15);
  }
  // Perturbing one scene pixel only moves that output pixel.
  Image scene2 = scene;
  scene2.at(10, 2) += 0.3;
  Image g = synthesize_frame(scene2, p, 3, 0.2);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 64; ++x) {
      if (x == 10 && y == 2)
        CHECK(g.at(x, y) != f.at(x, y));
      else
        CHECK(g.at(x, y) == f.at(x, y));
    }
}

TEST_CASE("apply_gamma: identity, fixed point, scalar power") {
  Image in(2, 1);
  in.at(0, 0) = 1.0;
  in.at(1, 0) = 0.5;
  Image id = apply_gamma(in, 1.0);
  CHECK(id.data == in.data);
  Image out = apply_gamma(in, 1.15);
  CHECK(out.at(0, 0) == 1.0);
  CHECK(out.at(1, 0) == Catch::Approx(std::pow(0.5, 1.15)).margin(1e-15));
}

TEST_CASE("apply_gamma rejects negative input and gamma below 1") {
  Image in(1, 1, -0.1);
  CHECK_THROWS_AS(apply_gamma(in, 1.15), std::domain_error);
  Image ok(1, 1, 0.5);
  CHECK_THROWS_AS(apply_gamma(ok, 0.9), std::invalid_argument);
}

TEST_CASE("add_noise: gain 0 is the identity") {
  Image in(8, 8, 0.37);
  CaptureConfig c;
  Image out = add_noise(in, c);
  CHECK(out.data == in.data);
}

TEST_CASE("add_noise: photon-transfer std at G=0.02, I=0.5") {
  Image in(1000, 1000, 0.5);
  CaptureConfig c;
  c.gain = 0.02;
  c.seed = 42;
  Image out = add_noise(in, c);
  double mean = 0.0;
  for (double v : out.data) mean += v - 0.5;
  mean /= static_cast<double>(out.size());
  double ss = 0.0;
  for (double v : out.data) ss += (v - 0.5 - mean) * (v - 0.5 - mean);
  double sd = std::sqrt(ss / static_cast<double>(out.size() - 1));
  CHECK(sd == Catch::Approx(std::sqrt(0.01)).epsilon(0.01));  // within 1% at 1e6 draws
}

TEST_CASE("add_noise: fixed seed reproduces, frame tag separates") {
  Image in(32, 16, 0.5);
  CaptureConfig c;
  c.gain = 0.02;
  c.seed = 7;
  Image a = add_noise(in, c, 3);
  Image b = add_noise(in, c, 3);
  CHECK(a.data == b.data);
  Image d = add_noise(in, c, 4);
  CHECK(a.data != d.data);
}

TEST_CASE("kinematic trajectory values and invariants") {
  MotionTrajectory m = MotionTrajectory::kinematic(0.25, 0.01, 20);
  CHECK(m.at(0) == 0.0);  // datum frame carries zero offset
  CHECK(m.at(19) == Catch::Approx(0.25 * 19 + 0.005 * 19 * 19).margin(1e-15));
  CHECK_THROWS_AS(m.at(20), std::out_of_range);

  // With dyadic coefficients the difference identities are exact.
  MotionTrajectory e = MotionTrajectory::kinematic(0.25, 0.25, 16);
  for (size_t i = 0; i + 2 < e.size(); ++i)
    CHECK(e.at(i + 2) - 2.0 * e.at(i + 1) + e.at(i) == 0.25);
  for (size_t i = 0; i + 3 < e.size(); ++i)
    CHECK(e.at(i + 3) - 3.0 * e.at(i + 2) + 3.0 * e.at(i + 1) - e.at(i) == 0.0);
}

TEST_CASE("simulate_capture: static frames are exactly N-periodic") {
  FringeParams p;
  p.width = 32;
  p.height = 4;
  Image scene = make_ramp_scene(p);
  CaptureConfig c;
  std::vector<Image> frames = simulate_capture(scene, p, MotionTrajectory::statically(), c, 12);
  for (int i = 0; i + 4 < 12; ++i) CHECK(frames[static_cast<size_t>(i)].data == frames[static_cast<size_t>(i) + 4].data);
}

TEST_CASE("simulate_capture precondition errors") {
  FringeParams p;
  p.width = 8;
  p.height = 2;
  Image scene = make_ramp_scene(p);
  CaptureConfig c;
  CHECK_THROWS_AS(simulate_capture(scene, p, MotionTrajectory::statically(), c, 3),
                  std::invalid_argument);  // fewer than one shift cycle
  MotionTrajectory short_motion = MotionTrajectory::kinematic(0.1, 0.0, 5);
  CHECK_THROWS_AS(simulate_capture(scene, p, short_motion, c, 8), std::invalid_argument);
}

TEST_CASE("fringe parameter invariants") {
  FringeParams p;
  p.A = 0.4;
  p.B = 0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);  // A - B < 0
  p = FringeParams{};
  p.A = 0.7;
  p.B = 0.4;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);  // A + B > 1
  p = FringeParams{};
  p.steps = 2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("pgm16: quantization, clamping, big-endian layout") {
  Image img(5, 1);
  img.at(0, 0) = 0.0;
  img.at(1, 0) = 1.0;
  img.at(2, 0) = 1.2;    // clamps to 65535
  img.at(3, 0) = -0.25;  // clamps to 0
  img.at(4, 0) = 0.5;    // 32767.5 rounds half up to 32768
  std::string path = temp_path("fringe_pgm_test.pgm");
  write_pgm16(img, path);

  std::ifstream in(path, std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  CHECK(magic == "P5");
  CHECK(w == 5);
  CHECK(h == 1);
  CHECK(maxval == 65535);
  in.get();
  unsigned char buf[10];
  in.read(reinterpret_cast<char*>(buf), 10);
  auto sample = [&](int i) { return (buf[2 * i] << 8) | buf[2 * i + 1]; };
  CHECK(sample(0) == 0);
  CHECK(sample(1) == 65535);
  CHECK(sample(2) == 65535);
  CHECK(sample(3) == 0);
  CHECK(sample(4) == 32768);
  std::filesystem::remove(path);
}

TEST_CASE("pgm16 round-trip") {
  Image img(16, 9);
  Rng rng(5);
  for (double& v : img.data) v = rng.uniform01();
  std::string path = temp_path("fringe_pgm_roundtrip.pgm");
  write_pgm16(img, path);
  Image back = read_pgm16(path);
  REQUIRE(back.width == img.width);
  REQUIRE(back.height == img.height);
  for (size_t i = 0; i < img.size(); ++i)
    CHECK(back.data[i] == Catch::Approx(img.data[i]).margin(0.5 / 65535.0 + 1e-9));
  std::filesystem::remove(path);
}

TEST_CASE("rng: determinism and ranges") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng u(9);
  for (int i = 0; i < 10000; ++i) {
    double v = u.uniform01();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("rng: normal moments") {
  Rng g(2026);
  const int n = 200000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = g.normal();
    s += z;
    ss += z * z;
  }
  double mean = s / n;
  double var = ss / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == Catch::Approx(1.0).epsilon(0.02));
}
