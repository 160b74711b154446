#include "corrsbl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "corrsbl/io.hpp"
#include "doctest.h"

using corrsbl::Exp1Config;
using corrsbl::Exp2Config;
using corrsbl::Exp3Config;
using corrsbl::LimitsConfig;
using corrsbl::MatrixXd;
using corrsbl::SweepTable;
using corrsbl::VectorXd;

namespace {

std::map<std::string, std::string> kv(
    std::initializer_list<std::pair<const std::string, std::string>> items) {
  return std::map<std::string, std::string>(items);
}

Exp1Config mini_exp1() {
  Exp1Config c;
  c.n = 16;
  c.m = 32;
  c.num_blocks = 8;
  c.block_size = 4;
  c.k_active = 2;
  c.beta_grid = {0.0, 0.9};
  c.trials = 3;
  c.seed = 11;
  c.record_timing = false;
  return c;
}

}  // namespace

TEST_CASE("normalized error basics") {
  MatrixXd truth(2, 2);
  truth << 1.0, -2.0, 3.0, 0.5;
  CHECK(corrsbl::nmse(truth, truth) == 0.0);
  CHECK(corrsbl::nmse(MatrixXd::Zero(2, 2), truth) == 1.0);
  CHECK(corrsbl::nmse(MatrixXd(1.001 * truth), truth) ==
        doctest::Approx(1e-6).epsilon(1e-6));
  CHECK_THROWS_AS(corrsbl::nmse(truth, MatrixXd::Zero(2, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(corrsbl::nmse(MatrixXd::Zero(2, 3), truth),
                  std::invalid_argument);
}

TEST_CASE("sweep table serialization") {
  corrsbl::SweepRow row;
  row.experiment = "exp1";
  row.solver = "bsbl_corr";
  row.param_name = "beta";
  row.param_value = -0.99;
  row.trials = 4;
  row.mean_nmse = 0.25;
  row.success_rate = 0.75;
  row.ci_halfwidth = 0.125;
  row.mean_wall_time_s = 0.0;
  const std::string text = corrsbl::sweep_csv({row});
  const std::string header =
      "experiment,solver,param_name,param_value,trials,mean_nmse,"
      "success_rate,ci_halfwidth,mean_wall_time_s\n";
  REQUIRE(text.size() > header.size());
  CHECK(text.substr(0, header.size()) == header);
  CHECK(text.find("exp1,bsbl_corr,beta,-0.99,4,0.25,0.75,0.125,0") !=
        std::string::npos);
}

TEST_CASE("block-sparse sweep is deterministic and thread-invariant") {
  Exp1Config cfg = mini_exp1();
  SweepTable a = corrsbl::run_experiment1(cfg);
  SweepTable b = corrsbl::run_experiment1(cfg);
  CHECK(corrsbl::sweep_csv(a.rows) == corrsbl::sweep_csv(b.rows));

  Exp1Config threaded = cfg;
  threaded.threads = 2;
  SweepTable c = corrsbl::run_experiment1(threaded);
  CHECK(corrsbl::sweep_csv(a.rows) == corrsbl::sweep_csv(c.rows));

  REQUIRE(a.rows.size() == 4);  // 2 solvers x 2 grid points
  for (const auto& row : a.rows) {
    CHECK(row.trials == 3);
    const double count = row.success_rate * row.trials;
    CHECK(std::abs(count - std::round(count)) < 1e-9);
    CHECK(row.mean_wall_time_s == 0.0);
  }
}

TEST_CASE("adding trials preserves the existing trial results") {
  Exp1Config small = mini_exp1();
  Exp1Config large = mini_exp1();
  large.trials = 5;
  SweepTable s = corrsbl::run_experiment1(small);
  SweepTable l = corrsbl::run_experiment1(large);
  int matched = 0;
  for (const auto& rec : s.records) {
    for (const auto& other : l.records) {
      if (other.solver == rec.solver && other.param_value == rec.param_value &&
          other.seed == rec.seed) {
        CHECK(other.nmse == rec.nmse);
        CHECK(other.success == rec.success);
        ++matched;
      }
    }
  }
  CHECK(matched == static_cast<int>(s.records.size()));
}

TEST_CASE("joint-recovery sweep emits one row per solver and grid point") {
  Exp2Config cfg;
  cfg.n = 10;
  cfg.m = 30;
  cfg.l = 3;
  cfg.k = 3;
  cfg.rho_grid = {0.0, 0.8};
  cfg.trials = 2;
  cfg.seed = 7;
  cfg.record_timing = false;
  SweepTable t = corrsbl::run_experiment2(cfg);
  REQUIRE(t.rows.size() == 4);
  std::vector<std::string> solvers;
  for (const auto& row : t.rows) {
    solvers.push_back(row.solver);
    CHECK(row.param_name == "rho");
    CHECK(row.trials == 2);
  }
  CHECK(std::count(solvers.begin(), solvers.end(), "tmsbl") == 2);
  CHECK(std::count(solvers.begin(), solvers.end(), "msbl") == 2);

  SweepTable again = corrsbl::run_experiment2(cfg);
  CHECK(corrsbl::sweep_csv(t.rows) == corrsbl::sweep_csv(again.rows));
}

TEST_CASE("time-varying sweep covers both solvers at each window size") {
  Exp3Config cfg;
  cfg.n = 16;
  cfg.m = 48;
  cfg.t = 8;
  cfg.initial_k = 3;
  cfg.events = "3+2,5-1";
  cfg.max_duration = 6;
  cfg.snr_db = 20.0;
  cfg.windows = {2, 4};
  cfg.trials = 2;
  cfg.seed = 13;
  cfg.record_timing = false;
  SweepTable t = corrsbl::run_experiment3(cfg);
  REQUIRE(t.rows.size() == 4);
  std::vector<std::string> names;
  for (const auto& row : t.rows) {
    names.push_back(row.solver);
    CHECK(row.param_name == "window");
    CHECK((row.param_value == 2.0 || row.param_value == 4.0));
  }
  for (const char* want :
       {"tv_tmsbl_w2", "tv_msbl_w2", "tv_tmsbl_w4", "tv_msbl_w4"}) {
    CHECK(std::count(names.begin(), names.end(), want) == 1);
  }

  SweepTable again = corrsbl::run_experiment3(cfg);
  CHECK(corrsbl::sweep_csv(t.rows) == corrsbl::sweep_csv(again.rows));
}

TEST_CASE("support-limit sweep derives its threshold from the rate") {
  LimitsConfig cfg;
  cfg.m = 8;
  cfg.n_grid = {2, 4};
  cfg.trials = 25;
  cfg.seed = 3;
  corrsbl::LimitsTable table = corrsbl::run_limits_sweep(cfg);
  REQUIRE(table.rows.size() == 2);
  // ones(2, 1), s = 1 / 0.1: c = min(ln(11)/2, ln(21)/4) = ln(21)/4, and
  // ceil(ln 8 / c) = 3.
  CHECK(table.report.c_value == doctest::Approx(std::log(21.0) / 4.0));
  for (const auto& row : table.rows) {
    CHECK(row.threshold_n == 3);
    CHECK(row.threshold_n == corrsbl::threshold_measurements(8, table.report));
    // The Wilson upper bound at p = 1 rounds an ulp below 1, so containment
    // holds only up to that rounding.
    CHECK(row.ci_low <= row.error_rate + 1e-12);
    CHECK(row.error_rate <= row.ci_high + 1e-12);
  }

  const std::string text = corrsbl::limits_csv(table);
  const std::string header = "n,error_rate,ci_low,ci_high,threshold_n\n";
  CHECK(text.substr(0, header.size()) == header);

  corrsbl::LimitsTable again = corrsbl::run_limits_sweep(cfg);
  CHECK(corrsbl::limits_csv(again) == text);

  LimitsConfig threaded = cfg;
  threaded.threads = 3;
  corrsbl::LimitsTable par = corrsbl::run_limits_sweep(threaded);
  CHECK(corrsbl::limits_csv(par) == text);
}

TEST_CASE("scalar parsing helpers") {
  CHECK(corrsbl::parse_int("k", "12") == 12);
  CHECK_THROWS_WITH_AS(corrsbl::parse_int("k", "12x"),
                       doctest::Contains("k"), std::invalid_argument);
  CHECK(corrsbl::parse_double("tol", "1e-3") == 1e-3);
  CHECK_THROWS_AS(corrsbl::parse_double("tol", "abc"), std::invalid_argument);
  CHECK(corrsbl::parse_u64("seed", "18446744073709551615") ==
        18446744073709551615ull);
  for (const char* v : {"true", "1", "on", "yes"})
    CHECK(corrsbl::parse_bool("flag", v));
  for (const char* v : {"false", "0", "off", "no"})
    CHECK_FALSE(corrsbl::parse_bool("flag", v));
  CHECK_THROWS_AS(corrsbl::parse_bool("flag", "maybe"), std::invalid_argument);

  CHECK(corrsbl::parse_int_list("grid", "2..5") ==
        std::vector<int>{2, 3, 4, 5});
  CHECK(corrsbl::parse_int_list("grid", "7") == std::vector<int>{7});
  CHECK(corrsbl::parse_int_list("grid", "1,3,5") ==
        std::vector<int>{1, 3, 5});
  CHECK_THROWS_AS(corrsbl::parse_int_list("grid", "2..1"),
                  std::invalid_argument);
  CHECK(corrsbl::parse_double_list("rho", "0.5,-0.25") ==
        std::vector<double>{0.5, -0.25});
}

TEST_CASE("experiment configs load from key-value maps") {
  Exp1Config e1 = Exp1Config::from_map(kv({{"n", "20"},
                                           {"m", "40"},
                                           {"num_blocks", "10"},
                                           {"block_size", "4"},
                                           {"k_active", "3"},
                                           {"amplitude", "2.0"},
                                           {"beta_grid", "0.0,0.5"},
                                           {"trials", "6"},
                                           {"seed", "42"},
                                           {"threads", "2"},
                                           {"record_timing", "false"},
                                           {"max_iters", "64"},
                                           {"tol", "1e-5"},
                                           {"prune_gamma", "1e-7"},
                                           {"lambda_denominator", "rows"}}));
  CHECK(e1.n == 20);
  CHECK(e1.m == 40);
  CHECK(e1.num_blocks == 10);
  CHECK(e1.k_active == 3);
  CHECK(e1.amplitude == 2.0);
  CHECK(e1.beta_grid == std::vector<double>{0.0, 0.5});
  CHECK(e1.trials == 6);
  CHECK(e1.seed == 42);
  CHECK(e1.threads == 2);
  CHECK_FALSE(e1.record_timing);
  CHECK(e1.solver.max_iters == 64);
  CHECK(e1.solver.tol == 1e-5);
  CHECK(e1.solver.prune_gamma == 1e-7);
  CHECK(e1.solver.lambda_denominator == corrsbl::LambdaDenominator::kRows);

  CHECK_THROWS_WITH_AS(Exp1Config::from_map(kv({{"bogus", "1"}})),
                       doctest::Contains("bogus"), std::invalid_argument);

  Exp2Config e2 = Exp2Config::from_map(kv({{"n", "12"},
                                           {"m", "36"},
                                           {"l", "3"},
                                           {"k", "4"},
                                           {"rho_grid", "0.0,0.9"},
                                           {"trials", "5"}}));
  CHECK(e2.l == 3);
  CHECK(e2.k == 4);
  CHECK(e2.rho_grid == std::vector<double>{0.0, 0.9});
  CHECK(e2.trials == 5);

  Exp3Config e3 = Exp3Config::from_map(kv({{"n", "24"},
                                           {"m", "64"},
                                           {"t", "12"},
                                           {"initial_k", "4"},
                                           {"events", "4+2,8-1"},
                                           {"ar_lo", "0.6"},
                                           {"ar_hi", "0.8"},
                                           {"max_duration", "8"},
                                           {"snr_db", "15"},
                                           {"windows", "2,3"},
                                           {"trials", "2"}}));
  CHECK(e3.t == 12);
  CHECK(e3.events == "4+2,8-1");
  CHECK(e3.ar_lo == 0.6);
  CHECK(e3.snr_db == 15.0);
  CHECK(e3.windows == std::vector<int>{2, 3});

  LimitsConfig lc = LimitsConfig::from_map(kv({{"k", "3"},
                                               {"l", "2"},
                                               {"m", "16"},
                                               {"n_grid", "2..4"},
                                               {"sigma_phi_sq", "2.0"},
                                               {"sigma_v_sq", "0.5"},
                                               {"trials", "10"}}));
  CHECK(lc.k == 3);
  CHECK(lc.l == 2);
  CHECK(lc.n_grid == std::vector<int>{2, 3, 4});
  CHECK(lc.sigma_phi_sq == 2.0);
  CHECK(lc.sigma_v_sq == 0.5);
}

TEST_CASE("limit configs can load the value matrix from a file") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() /
                 ("corrsbl_harness_test_" +
                  std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  const std::string wpath = (dir / "w.csv").string();
  MatrixXd w(3, 2);
  w << 1.0, -1.0, 2.0, 1.0, 0.5, 0.25;
  corrsbl::write_matrix_csv(wpath, w);

  LimitsConfig lc = LimitsConfig::from_map(kv({{"w_file", wpath}}));
  CHECK(lc.k == 3);
  CHECK(lc.l == 2);
  CHECK(lc.w == w);

  LimitsConfig with_k =
      LimitsConfig::from_map(kv({{"w_file", wpath}, {"k", "3"}, {"l", "2"}}));
  CHECK(with_k.k == 3);

  CHECK_THROWS_WITH_AS(
      LimitsConfig::from_map(kv({{"w_file", wpath}, {"k", "4"}})),
      doctest::Contains("k disagrees"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      LimitsConfig::from_map(kv({{"w_file", wpath}, {"l", "3"}})),
      doctest::Contains("l disagrees"), std::invalid_argument);

  fs::remove_all(dir);
}
