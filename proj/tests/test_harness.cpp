#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gyro/harness.hpp"
#include "gyro/transport.hpp"

using namespace gyro;
namespace fs = std::filesystem;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioConfig tiny_config(const std::string& out) {
  ScenarioConfig cfg;
  cfg.particles = 32;
  cfg.horizon = 0.2;
  cfg.dt = 0.02;
  cfg.snapshot_stride = 5;
  cfg.norm_grid_cells = 8;
  cfg.grid_cells = 8;
  cfg.grid_half_width = 3.0;
  cfg.norm_time_step = 0.1;
  cfg.semilag_times = {0.0, 0.2};
  cfg.reverse_dt = 0.02;
  cfg.threads = 2;
  cfg.out_dir = out;
  cfg.seed = 11;
  return cfg;
}
}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = ScenarioConfig::from_string(
      "# comment\n"
      "gamma = 2.5\n"
      "epsilon = 0.2\n"
      "epsilon.sweep = 0.4, 0.2\n"
      "particles = 17\n"
      "perturb.kind = shift\n"
      "perturb.shift = 0.05\n");
  CHECK(cfg.gamma == 2.5);
  CHECK(cfg.epsilon == 0.2);
  CHECK(cfg.epsilon_sweep.size() == 2);
  CHECK(cfg.particles == 17);
  CHECK(cfg.perturb_kind == "shift");

  CHECK_THROWS_AS(ScenarioConfig::from_string("no_such_key = 3\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ScenarioConfig::from_string("gamma = 1.5\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ScenarioConfig::from_string("epsilon = 2.0\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ScenarioConfig::from_string("dt = -0.1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ScenarioConfig::from_string("gamma == 3\n"),
                  std::invalid_argument);

  // the hash covers scenario content, not execution details
  ScenarioConfig a, b;
  b.out_dir = "elsewhere";
  b.threads = 7;
  CHECK(a.hash() == b.hash());
  b.seed = 43;
  CHECK(a.hash() != b.hash());
}

TEST_CASE("cumulative trapezoid") {
  const std::vector<double> nodes = {0.0, 1.0, 2.0};
  const std::vector<double> vals = {1.0, 3.0, 5.0};
  const auto out = cumulative_trapezoid_at(nodes, vals, {0.0, 0.5, 1.0, 2.0});
  CHECK(out[0] == 0.0);
  CHECK(out[1] == doctest::Approx(0.75));  // int of 1+2t on [0, 0.5]
  CHECK(out[2] == doctest::Approx(2.0));
  CHECK(out[3] == doctest::Approx(6.0));
  CHECK_THROWS(cumulative_trapezoid_at(nodes, vals, {3.0}));
}

TEST_CASE("degenerate single-particle stability run: cost stays at the shift") {
  auto cfg = tiny_config("tharness_out/one");
  cfg.particles = 1;
  cfg.perturb_kind = "shift";
  cfg.perturb_shift = 0.01;
  const auto res = run_stability(cfg);
  REQUIRE(res.rows.size() >= 2);
  for (const auto& r : res.rows) {
    CHECK(r.q == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(r.w1 == doctest::Approx(0.01).epsilon(1e-14));
  }
  CHECK(!res.violated);
}

TEST_CASE("unperturbed stability run reports zero cost") {
  auto cfg = tiny_config("tharness_out/zero");
  cfg.perturb_kind = "none";
  const auto res = run_stability(cfg);
  for (const auto& r : res.rows) {
    CHECK(r.q == 0.0);
    CHECK(r.w1 == 0.0);
  }
  CHECK(!res.violated);
}

TEST_CASE("stability run: reports, snapshots, regeneration") {
  auto cfg = tiny_config("tharness_out/stab");
  cfg.perturb_kind = "shift";
  cfg.perturb_shift = 0.02;
  const auto res = run_stability(cfg);
  CHECK(!res.violated);
  REQUIRE(fs::exists(cfg.out_dir + "/stability.csv"));
  REQUIRE(fs::exists(cfg.out_dir + "/pairing.csv"));
  REQUIRE(fs::exists(cfg.out_dir + "/manifest.json"));

  // every Q row can be rebuilt from the persisted snapshots and pairing
  std::ifstream pair_in(cfg.out_dir + "/pairing.csv");
  std::string line;
  std::getline(pair_in, line);  // header
  std::vector<int> pairing;
  while (std::getline(pair_in, line)) {
    const auto comma = line.find(',');
    pairing.push_back(std::stoi(line.substr(comma + 1)));
  }
  REQUIRE(pairing.size() == cfg.particles);
  for (std::size_t k = 0; k < res.rows.size(); ++k) {
    char fa[64], fb[64];
    std::snprintf(fa, sizeof fa, "/snapshots/f_%04zu.txt", k);
    std::snprintf(fb, sizeof fb, "/snapshots/g_%04zu.txt", k);
    const auto [sf, mf] = load_snapshot(cfg.out_dir + fa);
    const auto [sg, mg] = load_snapshot(cfg.out_dir + fb);
    CHECK(mf.time == doctest::Approx(res.rows[k].t));
    double q = 0.0;
    for (std::size_t i = 0; i < sf.size(); ++i)
      q += sf.weight(i) * (sf.point(i) - sg.point(pairing[i])).norm();
    CHECK(q == doctest::Approx(res.rows[k].q).epsilon(1e-12));
  }

  // determinism: a rerun into another directory writes identical bytes
  auto cfg2 = cfg;
  cfg2.out_dir = "tharness_out/stab_repeat";
  run_stability(cfg2);
  CHECK(slurp(cfg.out_dir + "/stability.csv") ==
        slurp(cfg2.out_dir + "/stability.csv"));
  CHECK(slurp(cfg.out_dir + "/snapshots/f_0002.txt") ==
        slurp(cfg2.out_dir + "/snapshots/f_0002.txt"));
}

TEST_CASE("norm check run") {
  auto cfg = tiny_config("tharness_out/norms");
  cfg.particles = 200;
  const auto res = run_norm_checks(cfg);
  REQUIRE(res.rows.size() == 2);
  CHECK(res.rows[0].t == 0.0);
  CHECK(res.rows[0].drift1 == 0.0);
  CHECK(res.rows[0].drift2 == 0.0);
  CHECK(res.rows[0].driftinf == 0.0);
  CHECK(res.rows[0].gamma_norm <= res.rows[0].gamma_bound);
  // short horizon, coarse grid: generous drift ceiling
  CHECK(std::abs(res.rows[1].drift1) <= 0.05);
  CHECK(fs::exists(cfg.out_dir + "/norms.csv"));
}

TEST_CASE("epsilon sweep run") {
  auto cfg = tiny_config("tharness_out/sweep");
  cfg.particles = 64;
  cfg.epsilon_sweep = {0.4, 0.2, 0.1};
  const auto res = run_epsilon_sweep(cfg);
  CHECK(res.final_w1.size() == 2);
  for (double w : res.final_w1) CHECK(w > 0.0);
  CHECK(fs::exists(cfg.out_dir + "/sweep.csv"));
  CHECK(fs::exists(cfg.out_dir + "/sweep_fit.csv"));
  for (const auto& r : res.rows) {
    if (r.t == 0.0) CHECK(r.w1 == 0.0);  // same initial ensemble
    CHECK((r.w1 == 0.0 || std::log(r.w1) <= r.log_envelope));
  }

  // identical scales are at distance zero for all times
  auto same = cfg;
  same.out_dir = "tharness_out/sweep_same";
  same.epsilon_sweep = {0.2, 0.2};
  const auto res2 = run_epsilon_sweep(same);
  for (const auto& r : res2.rows) CHECK(r.w1 == 0.0);
}
