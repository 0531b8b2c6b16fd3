#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "tcsi/engine_params.hpp"
#include "tcsi/error.hpp"
#include "tcsi/keyvalue.hpp"
#include "tcsi/manifest.hpp"
#include "tcsi/run_config.hpp"

using namespace tcsi;
namespace fs = std::filesystem;

TEST_CASE("key value parsing") {
  const auto kv = parse_key_values("# comment\n a = 1 \n\nb=two # trailing\n", "mem");
  REQUIRE(kv.size() == 2);
  CHECK(kv[0].key == "a");
  CHECK(kv[0].value == "1");
  CHECK(kv[1].value == "two");
  CHECK(kv[1].line == 4);
  CHECK_THROWS_AS(parse_key_values("novalue\n", "mem"), ConfigError);
  CHECK_THROWS_AS(parse_key_values("= 3\n", "mem"), ConfigError);
}

TEST_CASE("scalar parsing and formatting") {
  CHECK(parse_double("1e-3", "x") == 1e-3);
  CHECK_THROWS_AS(parse_double("1e-3x", "x"), ConfigError);
  CHECK(parse_integer("42", "n") == 42);
  CHECK(parse_bool("on", "b"));
  CHECK_FALSE(parse_bool("false", "b"));
  CHECK_THROWS_AS(parse_bool("maybe", "b"), ConfigError);
  for (double v : {0.1, 1e-300, 293.15, -7.25e11}) CHECK(parse_double(format_double(v), "v") == v);
}

TEST_CASE("engine parameter files") {
  const EngineParams p = parse_engine_params("V_d = 0.002\nkappa_em = 1.35\n");
  CHECK(p.V_d == 0.002);
  CHECK(p.c_ve == doctest::Approx(p.R_em / 0.35));
  CHECK_THROWS_AS(parse_engine_params("V_d = 1\nV_d = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_engine_params("warp_factor = 9\n"), ConfigError);
  const EngineParams back = parse_engine_params(format_engine_params(p));
  for (const auto& name : engine_param_names()) {
    CHECK(get_engine_param(back, name) == get_engine_param(p, name));
  }
}

TEST_CASE("run config settings") {
  RunConfig cfg;
  apply_config_text(cfg, "cycle = synthetic\nfault = f_Wc\ndt = 5e-4\nseed = 9\n"
                         "threshold = 6\ntf = 2.5\ngains.Kp_th = 2e-5\nengine.V_im = 0.002\n"
                         "noise_full_scale.y_pim = 2e5\n", "mem");
  CHECK(cfg.sim.cycle == "synthetic");
  CHECK(cfg.sim.fault == FaultId::f_Wc);
  CHECK(cfg.sim.dt == 5e-4);
  CHECK(cfg.sim.seed == 9);
  CHECK(cfg.diagnosis.J == 6.0);
  CHECK(cfg.diagnosis.t_f == 2.5);
  CHECK(cfg.sim.gains.Kp_th == 2e-5);
  CHECK(cfg.params.V_im == 0.002);
  CHECK(cfg.sim.noise.full_scale[5] == 2e5);
  CHECK_THROWS_AS(apply_setting(cfg, "warp", "9"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "fault", "f_nope"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "dt", "fast"), ConfigError);
}

TEST_CASE("run config formatting round trips") {
  RunConfig cfg;
  apply_config_text(cfg, "cycle = wltp\nfault = f_ypim\nnoise = false\nthreads = 3\n", "mem");
  RunConfig back;
  apply_config_text(back, format_run_config(cfg), "formatted");
  CHECK(format_run_config(back) == format_run_config(cfg));
  CHECK(back.sim.fault == FaultId::f_ypim);
  CHECK_FALSE(back.sim.noise.enabled);
}

TEST_CASE("environment overrides") {
  RunConfig cfg;
  apply_environment(cfg, {{"TCSI_SEED", "17"},
                          {"TCSI_engine__V_d", "0.0021"},
                          {"TCSI_GAINS__Ti_wg", "2"},
                          {"TCSI_DATA_DIR", "/nowhere"},
                          {"HOME", "/root"}});
  CHECK(cfg.sim.seed == 17);
  CHECK(cfg.params.V_d == 0.0021);
  CHECK(cfg.sim.gains.Ti_wg == 2.0);
  CHECK_THROWS_AS(apply_environment(cfg, {{"TCSI_BOGUS", "1"}}), ConfigError);
}

TEST_CASE("git blob hash") {
  CHECK(git_blob_hash("hello") == "b6fc4c620b67d95f953a5c1c1230aaab5db5a1b0");
  CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("results directory naming") {
  const fs::path base = fs::temp_directory_path() / "tcsi_unit_results";
  fs::remove_all(base);
  const fs::path a = make_results_dir(base, "eudc", "none", "20260101T000000Z");
  const fs::path b = make_results_dir(base, "eudc", "none", "20260101T000000Z");
  CHECK(a.filename() == "eudc_none_20260101T000000Z");
  CHECK(b.filename() == "eudc_none_20260101T000000Z-2");
  CHECK(fs::is_directory(a));
  CHECK(fs::is_directory(b));
  const std::string stamp = iso8601_basic_utc();
  CHECK(stamp.size() == 16);
  CHECK(stamp[8] == 'T');
  CHECK(stamp.back() == 'Z');

  Manifest m;
  m.command = "tcsi simulate";
  m.add("seed", "1");
  m.add_input("cycle", git_blob_hash("x"));
  m.write(a / "manifest.txt");
  std::ifstream in(a / "manifest.txt");
  std::string first;
  std::getline(in, first);
  CHECK(first == "command: tcsi simulate");
  fs::remove_all(base);
}
