#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "fringe/config.hpp"
#include "fringe/csv.hpp"
#include "fringe/experiments.hpp"

using namespace fringe;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* tag) {
  static int counter = 0;
  fs::path p = fs::temp_directory_path() /
               ("fringe_cli_" + std::to_string(::getpid()) + "_" + tag + "_" + std::to_string(counter++));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string f;
  while (std::getline(in, f, ',')) out.push_back(f);
  return out;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(FRINGESIM_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

}  // namespace

TEST_CASE("config: parsing, comments, trimming, duplicates") {
  Config c = Config::from_string(
      "# capture setup\n"
      "\n"
      "motion.v0 = 0.25\n"
      "  seed=42  \n"
      "name = ramp experiment\n"
      "motion.v0=0.5\n");
  CHECK(c.has("motion.v0"));
  CHECK(c.get_double("motion.v0", 0.0) == 0.5);  // later duplicate wins
  CHECK(c.get_u64("seed", 0) == 42);
  CHECK(c.get_string("name", "") == "ramp experiment");
  CHECK(c.get_long("missing", 7) == 7);
  CHECK_FALSE(c.has("comment"));
}

TEST_CASE("config: malformed input reports the line") {
  try {
    Config::from_string("a=1\nb=2\njust words\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(Config::from_string("=value\n"), ConfigError);
}

TEST_CASE("config: typed getters reject junk values") {
  Config c = Config::from_string("x=abc\ny=1.5z\nz=-3\n");
  CHECK_THROWS_AS(c.get_double("x", 0.0), ConfigError);
  CHECK_THROWS_AS(c.get_double("y", 0.0), ConfigError);
  CHECK_THROWS_AS(c.get_long("x", 0), ConfigError);
  CHECK_THROWS_AS(c.get_u64("x", 0), ConfigError);
  CHECK(c.get_long("z", 0) == -3);
}

TEST_CASE("config: serialization is sorted and round-trips") {
  Config c;
  c.set("zeta", "1");
  c.set("alpha", "2");
  c.set("motion.v0", "0.25");
  std::string s = c.serialize();
  CHECK(s == "alpha=2\nmotion.v0=0.25\nzeta=1\n");
  Config back = Config::from_string(s);
  CHECK(back.entries() == c.entries());
  CHECK(back.serialize() == s);
}

TEST_CASE("config: merge overlays the other store") {
  Config base = Config::from_string("a=1\nb=2\n");
  Config over = Config::from_string("b=3\nc=4\n");
  base.merge(over);
  CHECK(base.get_long("a", 0) == 1);
  CHECK(base.get_long("b", 0) == 3);
  CHECK(base.get_long("c", 0) == 4);
}

TEST_CASE("config: missing file is a config error") {
  CHECK_THROWS_AS(Config::from_file("/nonexistent/fringe.cfg"), ConfigError);
}

TEST_CASE("csv formatting helpers") {
  CHECK(fmt_double(0.5) == "0.5");
  CHECK(fmt_double(0.0) == "0");
  CHECK(fmt_double(2.54336e-06) == "2.54336e-06");
  CHECK(fmt_fixed(1.0, 6) == "1.000000");
  CHECK(fmt_fixed(0.725, 2) == "0.72");  // round-to-even at the cut
}

TEST_CASE("phase CSV dump schema") {
  PhaseMap m(2, 1);
  m.phase.at(0, 0) = 1.5;
  m.phase.at(1, 0) = 0.25;
  m.valid[1] = 0;
  fs::path dir = fresh_dir("phasecsv");
  fs::create_directories(dir);
  write_phase_csv(m, (dir / "p.csv").string());
  CHECK(slurp(dir / "p.csv") == "x,y,phase_rad,valid\n0,0,1.5,1\n1,0,0.25,0\n");
  fs::remove_all(dir);
}

TEST_CASE("decay command: file set, schema, reproducibility") {
  Config user = Config::from_string("scene.width=120\nscene.height=8\nk_max=3\n");
  fs::path d1 = fresh_dir("decay1"), d2 = fresh_dir("decay2");
  cmd_decay(user, d1.string());
  cmd_decay(user, d2.string());

  std::vector<std::string> names;
  for (const char* m : {"pbsc4", "ibsc"})
    for (const char* v : {"linear", "gamma"})
      names.push_back(std::string("decay_") + m + "_" + v + ".csv");
  for (const std::string& n : names) {
    REQUIRE(fs::exists(d1 / n));
    std::string body = slurp(d1 / n);
    CHECK(body == slurp(d2 / n));  // same config, same bytes
    std::vector<std::string> ls = lines_of(body);
    REQUIRE(ls.size() == 5);  // header + K = 0..3
    CHECK(ls[0] == "K,method,rmse_rad,dc_rad");
    for (int k = 0; k <= 3; ++k) {
      std::vector<std::string> f = fields_of(ls[static_cast<size_t>(k) + 1]);
      REQUIRE(f.size() == 4);
      CHECK(f[0] == std::to_string(k));
    }
  }
  CHECK(fs::exists(d1 / "config_echo.cfg"));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("decay command: the echoed config reruns byte-identically") {
  Config user = Config::from_string("scene.width=96\nscene.height=4\nk_max=2\nmotion.v0=0.2\n");
  fs::path d1 = fresh_dir("echo1"), d2 = fresh_dir("echo2");
  cmd_decay(user, d1.string());
  Config echoed = Config::from_file((d1 / "config_echo.cfg").string());
  cmd_decay(echoed, d2.string());
  for (const char* n : {"decay_pbsc4_linear.csv", "decay_ibsc_gamma.csv"})
    CHECK(slurp(d1 / n) == slurp(d2 / n));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("decay command: single-method override") {
  Config user = Config::from_string("scene.width=64\nscene.height=4\nk_max=1\nmethod=pbsc3\n");
  fs::path d = fresh_dir("decay3");
  cmd_decay(user, d.string());
  CHECK(fs::exists(d / "decay_pbsc3_linear.csv"));
  CHECK(fs::exists(d / "decay_pbsc3_gamma.csv"));
  CHECK_FALSE(fs::exists(d / "decay_pbsc4_linear.csv"));
  CHECK_FALSE(fs::exists(d / "decay_ibsc_linear.csv"));
  fs::remove_all(d);
}

TEST_CASE("decay command: config errors vs runtime errors") {
  fs::path d = fresh_dir("decayerr");
  Config bad_fringe = Config::from_string("fringe.modulation=0.9\n");  // exceeds the ambient
  CHECK_THROWS_AS(cmd_decay(bad_fringe, d.string()), ConfigError);
  Config bad_method = Config::from_string("method=psp\n");
  CHECK_THROWS_AS(cmd_decay(bad_method, d.string()), ConfigError);

  Config no_signal = Config::from_string("fringe.modulation=0\nscene.width=32\nscene.height=2\n");
  bool config_error = false, runtime_error_seen = false;
  try {
    cmd_decay(no_signal, d.string());
  } catch (const ConfigError&) {
    config_error = true;
  } catch (const std::runtime_error&) {
    runtime_error_seen = true;
  }
  CHECK_FALSE(config_error);  // valid config, degenerate data: a runtime failure
  CHECK(runtime_error_seen);
  fs::remove_all(d);
}

TEST_CASE("unwrap-sr command: table shape and depth-zero equivalence") {
  Config user;
  fs::path d = fresh_dir("unwrapsr");
  cmd_unwrap_sr(user, d.string());
  std::vector<std::string> ls = lines_of(slurp(d / "unwrap_sr.csv"));
  REQUIRE(ls.size() == 31);  // header + 3 unwrappers x 2 variants x K=0..4
  CHECK(ls[0] == "method,bsc,K,success_rate");
  std::string hier_k0;
  for (size_t i = 1; i < ls.size(); ++i) {
    std::vector<std::string> f = fields_of(ls[i]);
    REQUIRE(f.size() == 4);
    double sr = std::stod(f[3]);
    CHECK(sr >= 0.0);
    CHECK(sr <= 1.0);
    if (f[0] == "hierarchical" && f[2] == "0") {
      CHECK(sr < 0.9);
      if (f[1] == "pbsc4") hier_k0 = f[3];
      if (f[1] == "ibsc") CHECK(f[3] == hier_k0);  // depth 0 reduces both variants to one retrieval
    }
    if (f[2] == "4") CHECK(f[3] == "1.000000");
  }
  fs::remove_all(d);
}

TEST_CASE("noise command: row layout and the zero-gain column") {
  Config user = Config::from_string("noise.trials=16000\nnoise.psp_n=4,8\nnoise.bsc_k=0,2\n");
  fs::path d = fresh_dir("noise1");
  cmd_noise(user, d.string());
  std::vector<std::string> ls = lines_of(slurp(d / "noise.csv"));
  REQUIRE(ls.size() == 7);  // header + 2 psp + 2 depths x 2 methods
  CHECK(ls[0] == "N,method,sigma2_measured,sigma2_predicted");
  CHECK(fields_of(ls[1])[1] == "psp");
  CHECK(fields_of(ls[3])[1] == "pbsc4");
  CHECK(fields_of(ls[4])[1] == "ibsc");
  CHECK(fields_of(ls[3])[0] == "4");  // depth 0 uses N = 4 patterns
  CHECK(fields_of(ls[5])[0] == "6");
  CHECK(fs::exists(d / "noise_fit.txt"));
  fs::remove_all(d);

  Config quiet = Config::from_string("noise.trials=16000\nnoise.psp_n=4,8\nnoise.bsc_k=0\nnoise.gain=0\n");
  fs::path dq = fresh_dir("noise0");
  cmd_noise(quiet, dq.string());
  std::vector<std::string> qs = lines_of(slurp(dq / "noise.csv"));
  for (size_t i = 1; i < qs.size(); ++i) {
    CHECK(std::stod(fields_of(qs[i])[2]) < 1e-18);
    CHECK(std::stod(fields_of(qs[i])[3]) == 0.0);
  }
  std::string fit = slurp(dq / "noise_fit.txt");
  CHECK(fit.find("fit skipped") != std::string::npos);
  fs::remove_all(dq);
}

TEST_CASE("noise command: seed changes the measured column only") {
  Config a = Config::from_string("noise.trials=16000\nnoise.psp_n=4\nnoise.bsc_k=0\nseed=1\n");
  Config b = Config::from_string("noise.trials=16000\nnoise.psp_n=4\nnoise.bsc_k=0\nseed=2\n");
  fs::path da = fresh_dir("noisea"), db = fresh_dir("noiseb"), dc = fresh_dir("noisec");
  cmd_noise(a, da.string());
  cmd_noise(b, db.string());
  cmd_noise(a, dc.string());
  std::string ra = slurp(da / "noise.csv"), rb = slurp(db / "noise.csv"), rc = slurp(dc / "noise.csv");
  CHECK(ra != rb);
  CHECK(ra == rc);
  std::vector<std::string> la = lines_of(ra), lb = lines_of(rb);
  for (size_t i = 1; i < la.size(); ++i)
    CHECK(fields_of(la[i])[3] == fields_of(lb[i])[3]);  // predictions are seed-free
  fs::remove_all(da);
  fs::remove_all(db);
  fs::remove_all(dc);
}

TEST_CASE("bench command: counts in the table match the cost model") {
  Config user = Config::from_string("bench.width=32\nbench.height=24\nbench.reps=3\nk_max=1\n");
  fs::path d = fresh_dir("bench1");
  cmd_bench(user, d.string());
  std::vector<std::string> ls = lines_of(slurp(d / "bench.csv"));
  REQUIRE(ls.size() == 5);  // header + 2 methods x K = 0..1
  CHECK(ls[0] == "method,K,arctan,mod,addsub,muldiv,cmp,fps");
  for (size_t i = 1; i < ls.size(); ++i) {
    std::vector<std::string> f = fields_of(ls[i]);
    REQUIRE(f.size() == 8);
    OpCounts want = expected_ops(method_from_name(f[0]), std::stoi(f[1]));
    CHECK(std::stoll(f[2]) == want.arctan);
    CHECK(std::stoll(f[3]) == want.mod);
    CHECK(std::stoll(f[4]) == want.addsub);
    CHECK(std::stoll(f[5]) == want.muldiv);
    CHECK(std::stoll(f[6]) == want.cmp);
    CHECK(std::stod(f[7]) > 0.0);
  }
  fs::remove_all(d);
}

TEST_CASE("stream-demo command: emission schedule and dumps") {
  Config user = Config::from_string(
      "scene.width=120\nscene.height=8\nstream.frames=20\nstream.k=2\nmethod=ibsc\n");
  fs::path d = fresh_dir("stream1");
  cmd_stream_demo(user, d.string());
  int maps = 0;
  for (int i = 0; i < 20; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "phase_%03d.pgm", i);
    if (fs::exists(d / name)) {
      ++maps;
      CHECK(i >= 5);  // depth 2 window is 6 frames; nothing before warm-up
    }
  }
  CHECK(maps == 15);
  CHECK(lines_of(slurp(d / "latency.csv")).size() == 21);
  CHECK(lines_of(slurp(d / "phase_final.csv")).size() == static_cast<size_t>(120 * 8 + 1));
  fs::remove_all(d);

  Config too_short = Config::from_string("stream.frames=5\nstream.k=2\n");
  fs::path ds = fresh_dir("stream2");
  CHECK_THROWS_AS(cmd_stream_demo(too_short, ds.string()), ConfigError);
  fs::remove_all(ds);
}

TEST_CASE("binary: exit codes separate usage, config and runtime failures") {
  fs::path d = fresh_dir("bin");
  fs::create_directories(d);
  std::string out = " --out " + (d / "o").string();

  CHECK(run_cli("decay --k-max 2 --size 64x8" + out) == 0);
  CHECK(fs::exists(d / "o" / "decay_ibsc_linear.csv"));

  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 2);             // a subcommand is required
  CHECK(run_cli("--nope decay") == 2); // unknown flag
  CHECK(run_cli("decay --size 64by8" + out) == 2);
  CHECK(run_cli("decay --seed twelve" + out) == 2);
  CHECK(run_cli("decay --method psp" + out) == 2);

  std::ofstream(d / "bad.cfg") << "this line has no equals sign\n";
  CHECK(run_cli("decay --config " + (d / "bad.cfg").string() + out) == 2);
  CHECK(run_cli("decay --config " + (d / "missing.cfg").string() + out) == 2);

  std::ofstream(d / "nosignal.cfg") << "fringe.modulation=0\nscene.width=32\nscene.height=2\n";
  CHECK(run_cli("decay --config " + (d / "nosignal.cfg").string() + out) == 3);
  fs::remove_all(d);
}

TEST_CASE("binary: global flags reach the subcommand") {
  fs::path d = fresh_dir("binflags");
  CHECK(run_cli("bench --size 32x24 --k-max 0 --out " + (d / "b").string()) == 0);
  std::vector<std::string> ls = lines_of(slurp(d / "b" / "bench.csv"));
  REQUIRE(ls.size() == 3);  // header + 2 methods at K = 0
  Config echoed = Config::from_file((d / "b" / "config_echo.cfg").string());
  CHECK(echoed.get_long("bench.width", 0) == 32);
  CHECK(echoed.get_long("bench.height", 0) == 24);
  CHECK(echoed.get_long("k_max", -1) == 0);
  fs::remove_all(d);
}
