// Experiment harness: seeded sweeps for the three recovery experiments and
// the support-recovery-limits sweep, with CSV serialization and config-map
// loading. Per-trial seeds depend only on (master seed, experiment id,
// parameter index, trial index), so sweeps are reproducible for any thread
// count and stable under grid or trial-count extension.

#include "corrsbl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "corrsbl/bsbl.hpp"
#include "corrsbl/datagen.hpp"
#include "corrsbl/io.hpp"
#include "corrsbl/mmv.hpp"
#include "corrsbl/parallel.hpp"
#include "corrsbl/rng.hpp"
#include "corrsbl/tvs.hpp"

namespace corrsbl {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

BsblOptions make_options(const SolverKnobs& knobs, bool learn_lambda) {
  BsblOptions opt;
  opt.max_iters = knobs.max_iters;
  opt.tol = knobs.tol;
  opt.prune_gamma = knobs.prune_gamma;
  opt.lambda_denominator = knobs.lambda_denominator;
  opt.learn_lambda = learn_lambda;
  return opt;
}

LambdaDenominator parse_lambda_denominator(const std::string& value) {
  if (value == "M" || value == "columns") return LambdaDenominator::kColumns;
  if (value == "N" || value == "rows") return LambdaDenominator::kRows;
  throw std::invalid_argument(
      "lambda_denominator: expected M|columns or N|rows");
}

// Aggregates the trial records of one (sweep point, solver) cell into a row.
SweepRow aggregate(const std::string& experiment, const std::string& solver,
                   const std::string& param_name, double param_value,
                   const std::vector<TrialRecord>& records) {
  SweepRow row;
  row.experiment = experiment;
  row.solver = solver;
  row.param_name = param_name;
  row.param_value = param_value;
  row.trials = static_cast<int>(records.size());

  int successes = 0;
  int valid = 0;
  double nmse_sum = 0.0;
  double wall_sum = 0.0;
  for (const TrialRecord& r : records) {
    if (!r.failed) {
      ++valid;
      nmse_sum += r.nmse;
      if (r.success) ++successes;
    }
    wall_sum += r.wall_time_s;
  }
  row.mean_nmse = valid > 0 ? nmse_sum / valid
                            : std::numeric_limits<double>::quiet_NaN();
  row.success_rate = static_cast<double>(successes) / row.trials;
  row.ci_halfwidth = wilson95(successes, row.trials).halfwidth;
  row.mean_wall_time_s = wall_sum / row.trials;
  return row;
}

// Runs trials in parallel for one sweep point and a fixed list of solver
// names; solve(ti, record-per-solver) fills nmse/failed/wall per solver.
struct CellRunner {
  std::string experiment;
  std::string param_name;
  double param_value = 0.0;
  std::vector<std::string> solvers;
  int trials = 0;
  int threads = 1;

  // result[solver_idx][trial_idx]
  std::vector<std::vector<TrialRecord>> run(
      const std::function<void(int, std::vector<TrialRecord>&)>& trial_fn)
      const {
    std::vector<std::vector<TrialRecord>> out(
        solvers.size(),
        std::vector<TrialRecord>(static_cast<std::size_t>(trials)));
    parallel_for_index(
        static_cast<std::size_t>(trials), threads, [&](std::size_t ti) {
          std::vector<TrialRecord> recs(solvers.size());
          for (std::size_t s = 0; s < solvers.size(); ++s) {
            recs[s].experiment = experiment;
            recs[s].solver = solvers[s];
            recs[s].param_name = param_name;
            recs[s].param_value = param_value;
          }
          trial_fn(static_cast<int>(ti), recs);
          for (std::size_t s = 0; s < solvers.size(); ++s) {
            out[s][ti] = std::move(recs[s]);
          }
        });
    return out;
  }
};

void finish_record(TrialRecord& rec, const MatrixXd& estimate,
                   const MatrixXd& truth) {
  rec.nmse = nmse(estimate, truth);
  rec.success = rec.nmse <= kSuccessNmse;
}

// Shared trial wrapper: times the solve, catches solver exceptions.
void timed_solve(TrialRecord& rec, bool record_timing,
                 const std::function<MatrixXd()>& solve,
                 const MatrixXd& truth) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const MatrixXd estimate = solve();
    finish_record(rec, estimate, truth);
  } catch (const std::exception&) {
    rec.failed = true;
    rec.nmse = std::numeric_limits<double>::quiet_NaN();
  }
  rec.wall_time_s = record_timing ? elapsed_s(t0) : 0.0;
}

// Config-map reader that errors on unknown keys.
class ConfigReader {
 public:
  explicit ConfigReader(std::map<std::string, std::string> config)
      : config_(std::move(config)) {}

  void take(const std::string& key,
            const std::function<void(const std::string&)>& apply) {
    auto it = config_.find(key);
    if (it == config_.end()) return;
    apply(it->second);
    config_.erase(it);
  }

  void finish() const {
    if (!config_.empty()) {
      throw std::invalid_argument("unknown config key '" +
                                  config_.begin()->first + "'");
    }
  }

 private:
  std::map<std::string, std::string> config_;
};

void take_common(ConfigReader& reader, int& trials, std::uint64_t& seed,
                 int& threads, bool& record_timing, SolverKnobs& knobs) {
  reader.take("trials",
              [&](const std::string& v) { trials = parse_int("trials", v); });
  reader.take("seed",
              [&](const std::string& v) { seed = parse_u64("seed", v); });
  reader.take("threads",
              [&](const std::string& v) { threads = parse_int("threads", v); });
  reader.take("record_timing", [&](const std::string& v) {
    record_timing = parse_bool("record_timing", v);
  });
  reader.take("max_iters", [&](const std::string& v) {
    knobs.max_iters = parse_int("max_iters", v);
  });
  reader.take("tol",
              [&](const std::string& v) { knobs.tol = parse_double("tol", v); });
  reader.take("prune_gamma", [&](const std::string& v) {
    knobs.prune_gamma = parse_double("prune_gamma", v);
  });
  reader.take("lambda_denominator", [&](const std::string& v) {
    knobs.lambda_denominator = parse_lambda_denominator(v);
  });
}

std::vector<TvCountEvent> parse_events(const std::string& spec) {
  std::vector<TvCountEvent> out;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    const std::string token = spec.substr(pos, comma - pos);
    pos = comma + 1;
    if (token.empty()) {
      throw std::invalid_argument("events: empty entry");
    }
    const std::size_t sign = token.find_first_of("+-", 1);
    if (sign == std::string::npos) {
      throw std::invalid_argument("events: entry '" + token +
                                  "' needs a +count or -count");
    }
    const int col = parse_int("events", token.substr(0, sign));
    const int count = parse_int("events", token.substr(sign + 1));
    if (count < 1) {
      throw std::invalid_argument("events: count must be positive");
    }
    // Entries at the same column merge into one event.
    TvCountEvent* ev = nullptr;
    for (TvCountEvent& e : out) {
      if (e.start_col == col) ev = &e;
    }
    if (ev == nullptr) {
      out.push_back(TvCountEvent{col, 0, 0});
      ev = &out.back();
    }
    if (token[sign] == '+') {
      ev->added += count;
    } else {
      ev->removed += count;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const TvCountEvent& a, const TvCountEvent& b) {
              return a.start_col < b.start_col;
            });
  return out;
}

}  // namespace

double nmse(const MatrixXd& estimate, const MatrixXd& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw std::invalid_argument("estimate and truth shapes differ");
  }
  const double denom = truth.squaredNorm();
  if (denom == 0.0) {
    throw std::invalid_argument("NMSE is undefined for an all-zero truth");
  }
  return (estimate - truth).squaredNorm() / denom;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "experiment,solver,param_name,param_value,trials,mean_nmse,"
      "success_rate,ci_halfwidth,mean_wall_time_s\n";
  for (const SweepRow& r : rows) {
    out += r.experiment;
    out += ',';
    out += r.solver;
    out += ',';
    out += r.param_name;
    out += ',';
    out += fmt_double(r.param_value);
    out += ',';
    out += std::to_string(r.trials);
    out += ',';
    out += fmt_double(r.mean_nmse);
    out += ',';
    out += fmt_double(r.success_rate);
    out += ',';
    out += fmt_double(r.ci_halfwidth);
    out += ',';
    out += fmt_double(r.mean_wall_time_s);
    out += '\n';
  }
  return out;
}

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  out << sweep_csv(rows);
  if (!out) {
    throw std::runtime_error("write to " + path + " failed");
  }
}

SweepTable run_experiment1(const Exp1Config& config) {
  if (config.num_blocks * config.block_size != config.m) {
    throw std::invalid_argument("blocks must tile the coefficient vector");
  }
  if (config.n < 1 || config.n >= config.m) {
    throw std::invalid_argument("recovery requires 1 <= N < M");
  }
  if (config.k_active < 1 || config.k_active > config.num_blocks) {
    throw std::invalid_argument("active block count must lie in [1, g]");
  }
  if (config.trials < 1) {
    throw std::invalid_argument("trial count must be positive");
  }
  if (config.beta_grid.empty()) {
    throw std::invalid_argument("correlation grid must be nonempty");
  }
  for (double beta : config.beta_grid) {
    if (!(std::abs(beta) < 1.0)) {
      throw std::invalid_argument("correlation grid entries must have |beta| < 1");
    }
  }
  if (config.amplitude == 0.0) {
    throw std::invalid_argument("amplitude must be nonzero");
  }

  const BlockPartition part =
      BlockPartition::uniform(config.num_blocks, config.block_size);
  // Noiseless measurements: the noise level is held at its tiny floor.
  const BsblOptions base = make_options(config.solver, false);

  SweepTable table;
  for (std::size_t p = 0; p < config.beta_grid.size(); ++p) {
    const double beta = config.beta_grid[p];
    CellRunner cell;
    cell.experiment = "exp1";
    cell.param_name = "beta";
    cell.param_value = beta;
    cell.solvers = {"bsbl_corr", "bsbl_nocorr"};
    cell.trials = config.trials;
    cell.threads = config.threads;

    auto results = cell.run([&](int ti, std::vector<TrialRecord>& recs) {
      const std::uint64_t tseed =
          derive_seed(config.seed, {1, static_cast<std::uint64_t>(p),
                                    static_cast<std::uint64_t>(ti)});
      const Dictionary dict =
          gen_dictionary(config.n, config.m, derive_seed(tseed, {0}));
      const BlockSignal sig =
          gen_block_signal(part, config.k_active, beta, config.amplitude,
                           derive_seed(tseed, {1}));
      const VectorXd y = dict.phi() * sig.x;
      const MatrixXd truth = sig.x;
      for (auto& rec : recs) rec.seed = tseed;

      BsblOptions opt_corr = base;
      opt_corr.learn_corr = true;
      timed_solve(recs[0], config.record_timing,
                  [&]() -> MatrixXd {
                    return bsbl_em(dict, y, part, opt_corr).x_hat;
                  },
                  truth);

      BsblOptions opt_plain = base;
      opt_plain.learn_corr = false;
      timed_solve(recs[1], config.record_timing,
                  [&]() -> MatrixXd {
                    return bsbl_em(dict, y, part, opt_plain).x_hat;
                  },
                  truth);
    });

    for (std::size_t s = 0; s < cell.solvers.size(); ++s) {
      table.rows.push_back(
          aggregate("exp1", cell.solvers[s], "beta", beta, results[s]));
      for (auto& r : results[s]) table.records.push_back(std::move(r));
    }
  }
  return table;
}

SweepTable run_experiment2(const Exp2Config& config) {
  if (config.n < 1 || config.n >= config.m) {
    throw std::invalid_argument("recovery requires 1 <= N < M");
  }
  if (config.l < 1) {
    throw std::invalid_argument("measurement-vector count must be positive");
  }
  if (config.k < 1 || config.k > config.m) {
    throw std::invalid_argument("support size must lie in [1, M]");
  }
  if (config.trials < 1) {
    throw std::invalid_argument("trial count must be positive");
  }
  if (config.rho_grid.empty()) {
    throw std::invalid_argument("correlation grid must be nonempty");
  }
  for (double rho : config.rho_grid) {
    if (!(std::abs(rho) < 1.0)) {
      throw std::invalid_argument("correlation grid entries must have |rho| < 1");
    }
  }

  const BsblOptions base = make_options(config.solver, false);

  SweepTable table;
  for (std::size_t p = 0; p < config.rho_grid.size(); ++p) {
    const double rho = config.rho_grid[p];
    CellRunner cell;
    cell.experiment = "exp2";
    cell.param_name = "rho";
    cell.param_value = rho;
    cell.solvers = {"tmsbl", "msbl"};
    cell.trials = config.trials;
    cell.threads = config.threads;

    auto results = cell.run([&](int ti, std::vector<TrialRecord>& recs) {
      const std::uint64_t tseed =
          derive_seed(config.seed, {2, static_cast<std::uint64_t>(p),
                                    static_cast<std::uint64_t>(ti)});
      const Dictionary dict =
          gen_dictionary(config.n, config.m, derive_seed(tseed, {0}));
      const MmvSignal sig = gen_mmv_signal(config.m, config.l, config.k, rho,
                                           derive_seed(tseed, {1}));
      const MmvProblem problem(dict, dict.phi() * sig.x);
      const MatrixXd truth = sig.x;
      for (auto& rec : recs) rec.seed = tseed;

      timed_solve(recs[0], config.record_timing,
                  [&]() -> MatrixXd { return tmsbl(problem, base).x_hat; },
                  truth);
      timed_solve(recs[1], config.record_timing,
                  [&]() -> MatrixXd { return msbl(problem, base).x_hat; },
                  truth);
    });

    for (std::size_t s = 0; s < cell.solvers.size(); ++s) {
      table.rows.push_back(
          aggregate("exp2", cell.solvers[s], "rho", rho, results[s]));
      for (auto& r : results[s]) table.records.push_back(std::move(r));
    }
  }
  return table;
}

SweepTable run_experiment3(const Exp3Config& config) {
  if (config.n < 1 || config.n >= config.m) {
    throw std::invalid_argument("recovery requires 1 <= N < M");
  }
  if (config.t < 1) {
    throw std::invalid_argument("time-step count must be positive");
  }
  if (config.trials < 1) {
    throw std::invalid_argument("trial count must be positive");
  }
  if (config.windows.empty()) {
    throw std::invalid_argument("window list must be nonempty");
  }
  for (int w : config.windows) {
    if (w < 1 || w > config.t) {
      throw std::invalid_argument("window length must lie in [1, T]");
    }
  }
  const std::vector<TvCountEvent> events = parse_events(config.events);

  const BsblOptions base = make_options(config.solver, true);

  // All (solver, window) combinations run on the same per-trial data, so the
  // parameter index in the seed derivation is pinned to 0 and the window
  // value appears only in the output rows.
  SweepTable table;
  std::vector<std::string> solver_names;
  std::vector<std::pair<MmvSolver, int>> combos;
  for (int w : config.windows) {
    combos.emplace_back(MmvSolver::kTmsbl, w);
    solver_names.push_back("tv_tmsbl_w" + std::to_string(w));
    combos.emplace_back(MmvSolver::kMsbl, w);
    solver_names.push_back("tv_msbl_w" + std::to_string(w));
  }

  CellRunner cell;
  cell.experiment = "exp3";
  cell.param_name = "window";
  cell.param_value = 0.0;  // per-combo value set below
  cell.solvers = solver_names;
  cell.trials = config.trials;
  cell.threads = config.threads;

  auto results = cell.run([&](int ti, std::vector<TrialRecord>& recs) {
    const std::uint64_t tseed =
        derive_seed(config.seed, {3, 0, static_cast<std::uint64_t>(ti)});
    const Dictionary dict =
        gen_dictionary(config.n, config.m, derive_seed(tseed, {0}));
    const TvSignalSpec spec = random_tv_spec(
        config.m, config.t, config.initial_k, events, config.ar_lo,
        config.ar_hi, config.max_duration, derive_seed(tseed, {1}));
    const TvSignal sig = gen_tv_signal(spec, derive_seed(tseed, {2}));
    const NoisyMeasurements meas =
        add_noise(dict.phi() * sig.x, config.snr_db, derive_seed(tseed, {3}));
    const MatrixXd truth = sig.x;
    for (auto& rec : recs) rec.seed = tseed;

    for (std::size_t s = 0; s < combos.size(); ++s) {
      recs[s].param_value = combos[s].second;
      timed_solve(recs[s], config.record_timing,
                  [&]() -> MatrixXd {
                    TvProblem problem(dict, meas.y, combos[s].second);
                    return solve_time_varying(problem, combos[s].first, base)
                        .x_hat;
                  },
                  truth);
    }
  });

  for (std::size_t s = 0; s < combos.size(); ++s) {
    table.rows.push_back(aggregate("exp3", solver_names[s], "window",
                                   combos[s].second, results[s]));
    for (auto& r : results[s]) table.records.push_back(std::move(r));
  }
  return table;
}

LimitsTable run_limits_sweep(const LimitsConfig& config) {
  if (config.n_grid.empty()) {
    throw std::invalid_argument("measurement grid must be nonempty");
  }
  MatrixXd w = config.w;
  if (w.size() == 0) {
    w = MatrixXd::Ones(config.k, config.l);
  }
  const SignalValueMatrix values(w);
  if (values.k() != config.k || values.l() != config.l) {
    throw std::invalid_argument("signal value matrix disagrees with k or l");
  }

  LimitsTable table;
  table.report = c_of_w(values, config.sigma_phi_sq, config.sigma_v_sq);
  const int threshold = threshold_measurements(config.m, table.report, 0.0);

  for (std::size_t p = 0; p < config.n_grid.size(); ++p) {
    const int n = config.n_grid[p];
    const McResult mc = mc_error_rate(
        values, config.m, n, config.sigma_phi_sq, config.sigma_v_sq,
        config.trials, derive_seed(config.seed, {4, static_cast<std::uint64_t>(p)}),
        config.threads);
    LimitsRow row;
    row.n = n;
    row.error_rate = mc.error_rate;
    row.ci_low = mc.ci_low;
    row.ci_high = mc.ci_high;
    row.threshold_n = threshold;
    table.rows.push_back(row);
  }
  return table;
}

std::string limits_csv(const LimitsTable& table) {
  std::string out = "n,error_rate,ci_low,ci_high,threshold_n\n";
  for (const LimitsRow& r : table.rows) {
    out += std::to_string(r.n);
    out += ',';
    out += fmt_double(r.error_rate);
    out += ',';
    out += fmt_double(r.ci_low);
    out += ',';
    out += fmt_double(r.ci_high);
    out += ',';
    out += std::to_string(r.threshold_n);
    out += '\n';
  }
  return out;
}

void write_limits_csv(const std::string& path, const LimitsTable& table) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  out << limits_csv(table);
  if (!out) {
    throw std::runtime_error("write to " + path + " failed");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": expected an integer, got '" + value +
                                "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": expected a number, got '" + value +
                                "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") {
    return true;
  }
  if (value == "false" || value == "0" || value == "off" || value == "no") {
    return false;
  }
  throw std::invalid_argument(key + ": expected a boolean, got '" + value +
                              "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(key);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": expected an unsigned integer, got '" +
                                value + "'");
  }
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t comma = value.find(',', pos);
    if (comma == std::string::npos) comma = value.size();
    out.push_back(parse_double(key, value.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (out.empty()) {
    throw std::invalid_argument(key + ": expected a nonempty list");
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& key,
                                const std::string& value) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t comma = value.find(',', pos);
    if (comma == std::string::npos) comma = value.size();
    const std::string token = value.substr(pos, comma - pos);
    pos = comma + 1;
    const std::size_t dots = token.find("..");
    if (dots != std::string::npos) {
      const int lo = parse_int(key, token.substr(0, dots));
      const int hi = parse_int(key, token.substr(dots + 2));
      if (hi < lo) {
        throw std::invalid_argument(key + ": descending range '" + token + "'");
      }
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(parse_int(key, token));
    }
  }
  if (out.empty()) {
    throw std::invalid_argument(key + ": expected a nonempty list");
  }
  return out;
}

Exp1Config Exp1Config::from_map(std::map<std::string, std::string> config) {
  Exp1Config out;
  ConfigReader reader(std::move(config));
  reader.take("n", [&](const std::string& v) { out.n = parse_int("n", v); });
  reader.take("m", [&](const std::string& v) { out.m = parse_int("m", v); });
  reader.take("num_blocks", [&](const std::string& v) {
    out.num_blocks = parse_int("num_blocks", v);
  });
  reader.take("block_size", [&](const std::string& v) {
    out.block_size = parse_int("block_size", v);
  });
  reader.take("k_active", [&](const std::string& v) {
    out.k_active = parse_int("k_active", v);
  });
  reader.take("amplitude", [&](const std::string& v) {
    out.amplitude = parse_double("amplitude", v);
  });
  reader.take("beta_grid", [&](const std::string& v) {
    out.beta_grid = parse_double_list("beta_grid", v);
  });
  take_common(reader, out.trials, out.seed, out.threads, out.record_timing,
              out.solver);
  reader.finish();
  return out;
}

Exp2Config Exp2Config::from_map(std::map<std::string, std::string> config) {
  Exp2Config out;
  ConfigReader reader(std::move(config));
  reader.take("n", [&](const std::string& v) { out.n = parse_int("n", v); });
  reader.take("m", [&](const std::string& v) { out.m = parse_int("m", v); });
  reader.take("l", [&](const std::string& v) { out.l = parse_int("l", v); });
  reader.take("k", [&](const std::string& v) { out.k = parse_int("k", v); });
  reader.take("rho_grid", [&](const std::string& v) {
    out.rho_grid = parse_double_list("rho_grid", v);
  });
  take_common(reader, out.trials, out.seed, out.threads, out.record_timing,
              out.solver);
  reader.finish();
  return out;
}

Exp3Config Exp3Config::from_map(std::map<std::string, std::string> config) {
  Exp3Config out;
  ConfigReader reader(std::move(config));
  reader.take("n", [&](const std::string& v) { out.n = parse_int("n", v); });
  reader.take("m", [&](const std::string& v) { out.m = parse_int("m", v); });
  reader.take("t", [&](const std::string& v) { out.t = parse_int("t", v); });
  reader.take("initial_k", [&](const std::string& v) {
    out.initial_k = parse_int("initial_k", v);
  });
  reader.take("events", [&](const std::string& v) { out.events = v; });
  reader.take("ar_lo", [&](const std::string& v) {
    out.ar_lo = parse_double("ar_lo", v);
  });
  reader.take("ar_hi", [&](const std::string& v) {
    out.ar_hi = parse_double("ar_hi", v);
  });
  reader.take("max_duration", [&](const std::string& v) {
    out.max_duration = parse_int("max_duration", v);
  });
  reader.take("snr_db", [&](const std::string& v) {
    out.snr_db = parse_double("snr_db", v);
  });
  reader.take("windows", [&](const std::string& v) {
    out.windows = parse_int_list("windows", v);
  });
  take_common(reader, out.trials, out.seed, out.threads, out.record_timing,
              out.solver);
  reader.finish();
  return out;
}

LimitsConfig LimitsConfig::from_map(std::map<std::string, std::string> config) {
  LimitsConfig out;
  ConfigReader reader(std::move(config));
  bool explicit_k = false;
  bool explicit_l = false;
  reader.take("k", [&](const std::string& v) {
    out.k = parse_int("k", v);
    explicit_k = true;
  });
  reader.take("l", [&](const std::string& v) {
    out.l = parse_int("l", v);
    explicit_l = true;
  });
  reader.take("m", [&](const std::string& v) { out.m = parse_int("m", v); });
  reader.take("n_grid", [&](const std::string& v) {
    out.n_grid = parse_int_list("n_grid", v);
  });
  reader.take("sigma_phi_sq", [&](const std::string& v) {
    out.sigma_phi_sq = parse_double("sigma_phi_sq", v);
  });
  reader.take("sigma_v_sq", [&](const std::string& v) {
    out.sigma_v_sq = parse_double("sigma_v_sq", v);
  });
  reader.take("w_file", [&](const std::string& v) {
    out.w = read_matrix_csv(v);
  });
  reader.take("trials",
              [&](const std::string& v) { out.trials = parse_int("trials", v); });
  reader.take("seed",
              [&](const std::string& v) { out.seed = parse_u64("seed", v); });
  reader.take("threads", [&](const std::string& v) {
    out.threads = parse_int("threads", v);
  });
  reader.finish();

  if (out.w.size() != 0) {
    if (explicit_k && out.k != static_cast<int>(out.w.rows())) {
      throw std::invalid_argument("k disagrees with the loaded value matrix");
    }
    if (explicit_l && out.l != static_cast<int>(out.w.cols())) {
      throw std::invalid_argument("l disagrees with the loaded value matrix");
    }
    out.k = static_cast<int>(out.w.rows());
    out.l = static_cast<int>(out.w.cols());
  }
  return out;
}

}  // namespace corrsbl
