// Command-line front end: single-instance recovery plus the experiment and
// limits sweeps. Every subcommand reads an optional flat key=value config
// file; --set KEY=VALUE overrides the file, and the dedicated flags --seed,
// --trials, --threads and --out override both.

#include "CLI11.hpp"

#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corrsbl/bsbl.hpp"
#include "corrsbl/harness.hpp"
#include "corrsbl/io.hpp"
#include "corrsbl/mmv.hpp"
#include "corrsbl/tvs.hpp"

namespace {

using corrsbl::MatrixXd;
using corrsbl::VectorXd;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> assignments;
  std::uint64_t seed = 0;
  int trials = 0;
  int threads = 0;
  std::string out;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* out_opt = nullptr;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path,
                  "Flat key=value config file (# starts a comment)");
  cmd->add_option("--set", args.assignments,
                  "Override one config key, e.g. --set trials=50 (repeatable)");
  args.seed_opt =
      cmd->add_option("--seed", args.seed, "Master seed (overrides config)");
  args.trials_opt = cmd->add_option("--trials", args.trials,
                                    "Trials per sweep point (overrides config)");
  args.threads_opt = cmd->add_option(
      "--threads", args.threads,
      "Worker threads; 0 = hardware concurrency (overrides config)");
  args.out_opt = cmd->add_option("--out", args.out, "Output CSV path");
}

// Merges config file, --set overrides and explicit flags into one map, and
// strips the "out" key (resolved separately so from_map never sees it).
std::map<std::string, std::string> merged_config(const CommonArgs& args,
                                                 std::string& out_path,
                                                 const std::string& out_default) {
  std::map<std::string, std::string> config;
  if (!args.config_path.empty()) {
    config = corrsbl::read_key_value_file(args.config_path);
  }
  for (const std::string& assignment : args.assignments) {
    corrsbl::apply_assignment(config, assignment);
  }
  if (args.seed_opt->count() > 0) {
    config["seed"] = std::to_string(args.seed);
  }
  if (args.trials_opt->count() > 0) {
    config["trials"] = std::to_string(args.trials);
  }
  if (args.threads_opt->count() > 0) {
    config["threads"] = std::to_string(args.threads);
  }

  out_path = out_default;
  auto it = config.find("out");
  if (it != config.end()) {
    out_path = it->second;
    config.erase(it);
  }
  if (args.out_opt->count() > 0) {
    out_path = args.out;
  }
  return config;
}

std::string take_value(std::map<std::string, std::string>& config,
                       const std::string& key, const std::string& fallback) {
  auto it = config.find(key);
  if (it == config.end()) return fallback;
  std::string v = it->second;
  config.erase(it);
  return v;
}

corrsbl::BlockPartition parse_partition(const std::string& value, int m) {
  if (value.empty()) {
    return corrsbl::BlockPartition::uniform(m, 1);
  }
  if (value.rfind("uniform:", 0) == 0) {
    const std::string dims = value.substr(8);
    const std::size_t x = dims.find('x');
    if (x == std::string::npos) {
      throw std::invalid_argument("partition: expected uniform:GxD");
    }
    const int g = corrsbl::parse_int("partition", dims.substr(0, x));
    const int d = corrsbl::parse_int("partition", dims.substr(x + 1));
    if (g * d != m) {
      throw std::invalid_argument("partition does not tile the dictionary columns");
    }
    return corrsbl::BlockPartition::uniform(g, d);
  }
  std::vector<int> sizes = corrsbl::parse_int_list("partition", value);
  int total = 0;
  for (int s : sizes) total += s;
  if (total != m) {
    throw std::invalid_argument("partition does not tile the dictionary columns");
  }
  return corrsbl::BlockPartition(std::move(sizes));
}

int run_solve(const CommonArgs& args) {
  std::string out_path;
  std::map<std::string, std::string> config =
      merged_config(args, out_path, "x_hat.csv");
  // solve is deterministic; seed and trials are accepted but unused.
  config.erase("seed");
  config.erase("trials");
  config.erase("threads");

  const std::string phi_path = take_value(config, "phi", "");
  const std::string y_path = take_value(config, "y", "");
  if (phi_path.empty() || y_path.empty()) {
    throw std::invalid_argument("solve requires the config keys phi= and y=");
  }
  const std::string solver = take_value(config, "solver", "bsbl");
  const std::string partition_spec = take_value(config, "partition", "");
  const std::string window_spec = take_value(config, "window", "");

  corrsbl::BsblOptions options;
  {
    const std::string v = take_value(config, "learn_corr", "");
    if (!v.empty()) options.learn_corr = corrsbl::parse_bool("learn_corr", v);
  }
  {
    const std::string v = take_value(config, "learn_lambda", "");
    if (!v.empty()) {
      options.learn_lambda = corrsbl::parse_bool("learn_lambda", v);
    }
  }
  {
    const std::string v = take_value(config, "lambda_init", "");
    if (!v.empty()) options.lambda_init = corrsbl::parse_double("lambda_init", v);
  }
  {
    const std::string v = take_value(config, "lambda_fixed", "");
    if (!v.empty()) {
      options.lambda_fixed = corrsbl::parse_double("lambda_fixed", v);
    }
  }
  {
    const std::string v = take_value(config, "max_iters", "");
    if (!v.empty()) options.max_iters = corrsbl::parse_int("max_iters", v);
  }
  {
    const std::string v = take_value(config, "tol", "");
    if (!v.empty()) options.tol = corrsbl::parse_double("tol", v);
  }
  {
    const std::string v = take_value(config, "prune_gamma", "");
    if (!v.empty()) {
      options.prune_gamma = corrsbl::parse_double("prune_gamma", v);
    }
  }
  {
    const std::string v = take_value(config, "lambda_denominator", "");
    if (!v.empty()) {
      if (v == "M" || v == "columns") {
        options.lambda_denominator = corrsbl::LambdaDenominator::kColumns;
      } else if (v == "N" || v == "rows") {
        options.lambda_denominator = corrsbl::LambdaDenominator::kRows;
      } else {
        throw std::invalid_argument(
            "lambda_denominator: expected M|columns or N|rows");
      }
    }
  }
  if (!config.empty()) {
    throw std::invalid_argument("unknown config key '" +
                                config.begin()->first + "'");
  }

  const bool is_tv = solver == "tv_tmsbl" || solver == "tv_msbl";
  if (!is_tv && !window_spec.empty()) {
    throw std::invalid_argument("window is only used by the tv solvers");
  }

  const corrsbl::Dictionary dict(corrsbl::read_matrix_csv(phi_path));
  const MatrixXd y = corrsbl::read_matrix_csv(y_path);
  if (y.rows() != dict.n()) {
    throw std::invalid_argument("measurement rows must match dictionary rows");
  }

  MatrixXd x_hat;
  if (solver == "bsbl") {
    if (y.cols() != 1) {
      throw std::invalid_argument("bsbl expects a single measurement column");
    }
    const corrsbl::BlockPartition part = parse_partition(partition_spec, dict.m());
    const corrsbl::RecoveryResult r =
        corrsbl::bsbl_em(dict, y.col(0), part, options);
    x_hat = r.x_hat;
    std::cout << "solver=bsbl iters=" << r.iters
              << " converged=" << (r.converged ? "yes" : "no")
              << " lambda=" << r.lambda << " corr=" << r.corr_coeff << "\n";
  } else if (solver == "tmsbl" || solver == "msbl") {
    if (!partition_spec.empty()) {
      throw std::invalid_argument("partition is only used by the bsbl solver");
    }
    const corrsbl::MmvProblem problem(dict, y);
    const corrsbl::MmvResult r = solver == "tmsbl"
                                     ? corrsbl::tmsbl(problem, options)
                                     : corrsbl::msbl(problem, options);
    x_hat = r.x_hat;
    std::cout << "solver=" << solver << " iters=" << r.iters
              << " converged=" << (r.converged ? "yes" : "no")
              << " lambda=" << r.lambda << " corr=" << r.corr_coeff
              << " support=" << r.support_estimate.size() << " rows\n";
  } else if (solver == "tv_tmsbl" || solver == "tv_msbl") {
    if (!partition_spec.empty()) {
      throw std::invalid_argument("partition is only used by the bsbl solver");
    }
    if (window_spec.empty()) {
      throw std::invalid_argument(solver + " requires the config key window=");
    }
    const int window = corrsbl::parse_int("window", window_spec);
    const corrsbl::TvProblem problem(dict, y, window);
    const corrsbl::MmvSolver kind = solver == "tv_tmsbl"
                                        ? corrsbl::MmvSolver::kTmsbl
                                        : corrsbl::MmvSolver::kMsbl;
    const corrsbl::TvResult r =
        corrsbl::solve_time_varying(problem, kind, options);
    x_hat = r.x_hat;
    std::cout << "solver=" << solver << " windows=" << r.windows.size() << "\n";
    for (const corrsbl::WindowDiag& d : r.windows) {
      std::cout << "  window start=" << d.start << " len=" << d.len;
      if (d.failed) {
        std::cout << " FAILED: " << d.error << "\n";
      } else {
        std::cout << " support=" << d.support.size()
                  << " iters=" << d.iters
                  << " converged=" << (d.converged ? "yes" : "no")
                  << " corr=" << d.corr_coeff << "\n";
      }
    }
  } else {
    throw std::invalid_argument(
        "solver: expected bsbl, tmsbl, msbl, tv_tmsbl or tv_msbl");
  }

  corrsbl::write_matrix_csv(out_path, x_hat);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

template <class Config, class Runner>
int run_experiment(const CommonArgs& args, const std::string& out_default,
                   const Runner& runner) {
  std::string out_path;
  std::map<std::string, std::string> config =
      merged_config(args, out_path, out_default);
  const Config cfg = Config::from_map(std::move(config));
  const corrsbl::SweepTable table = runner(cfg);
  corrsbl::write_sweep_csv(out_path, table.rows);
  std::cout << "wrote " << out_path << " (" << table.rows.size() << " rows, "
            << table.records.size() << " trials)\n";
  return 0;
}

int run_limits(const CommonArgs& args) {
  std::string out_path;
  std::map<std::string, std::string> config =
      merged_config(args, out_path, "limits.csv");
  const corrsbl::LimitsConfig cfg =
      corrsbl::LimitsConfig::from_map(std::move(config));
  const corrsbl::LimitsTable table = corrsbl::run_limits_sweep(cfg);
  corrsbl::write_limits_csv(out_path, table);
  std::cout << "c=" << table.report.c_value << " argmin_subset=";
  for (std::size_t i = 0; i < table.report.argmin_subset.size(); ++i) {
    std::cout << (i ? "," : "") << table.report.argmin_subset[i];
  }
  if (!table.rows.empty()) {
    std::cout << " threshold_n=" << table.rows.front().threshold_n;
  }
  std::cout << "\nwrote " << out_path << " (" << table.rows.size()
            << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation-aware sparse Bayesian recovery toolkit"};
  app.require_subcommand(1);

  CommonArgs solve_args, exp1_args, exp2_args, exp3_args, limits_args;

  CLI::App* solve =
      app.add_subcommand("solve", "Recover one instance from matrix files");
  add_common_options(solve, solve_args);

  CLI::App* exp1 = app.add_subcommand(
      "exp1", "Block-sparse recovery vs. intra-block correlation");
  add_common_options(exp1, exp1_args);

  CLI::App* exp2 = app.add_subcommand(
      "exp2", "Joint row-sparse recovery vs. inter-vector correlation");
  add_common_options(exp2, exp2_args);

  CLI::App* exp3 = app.add_subcommand(
      "exp3", "Windowed recovery of a time-varying support");
  add_common_options(exp3, exp3_args);

  CLI::App* limits = app.add_subcommand(
      "limits", "Support-recovery error rate vs. measurement count");
  add_common_options(limits, limits_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(solve_args);
    if (exp1->parsed()) {
      return run_experiment<corrsbl::Exp1Config>(exp1_args, "exp1.csv",
                                                 corrsbl::run_experiment1);
    }
    if (exp2->parsed()) {
      return run_experiment<corrsbl::Exp2Config>(exp2_args, "exp2.csv",
                                                 corrsbl::run_experiment2);
    }
    if (exp3->parsed()) {
      return run_experiment<corrsbl::Exp3Config>(exp3_args, "exp3.csv",
                                                 corrsbl::run_experiment3);
    }
    if (limits->parsed()) return run_limits(limits_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
