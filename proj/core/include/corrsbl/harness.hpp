#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "corrsbl/bsbl.hpp"
#include "corrsbl/limits.hpp"
#include "corrsbl/linmodel.hpp"

namespace corrsbl {

// ||estimate - truth||_F^2 / ||truth||_F^2. Throws on all-zero truth.
double nmse(const MatrixXd& estimate, const MatrixXd& truth);

// A trial succeeds when its NMSE is at most this bound.
inline constexpr double kSuccessNmse = 1e-6;

struct TrialRecord {
  std::string experiment;
  std::string solver;
  std::string param_name;
  double param_value = 0.0;
  std::uint64_t seed = 0;  // data seed of the trial
  double nmse = 0.0;
  bool success = false;
  bool failed = false;  // solver threw; counted as non-success
  double wall_time_s = 0.0;
};

struct SweepRow {
  std::string experiment;
  std::string solver;
  std::string param_name;
  double param_value = 0.0;
  int trials = 0;
  double mean_nmse = 0.0;     // over non-failed trials
  double success_rate = 0.0;  // successes / trials
  double ci_halfwidth = 0.0;  // Wilson 95% halfwidth for the success rate
  double mean_wall_time_s = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<TrialRecord> records;  // trial order within each sweep point
};

// Header plus one line per row; floats with 12 significant digits.
std::string sweep_csv(const std::vector<SweepRow>& rows);
void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows);

// Shared solver knobs exposed by every experiment config.
struct SolverKnobs {
  int max_iters = 500;
  double tol = 1e-6;
  double prune_gamma = 1e-8;
  LambdaDenominator lambda_denominator = LambdaDenominator::kColumns;
};

// Block-sparse single-vector recovery sweep over the signal correlation
// coefficient, run once with the correlation model learned and once with it
// disabled, on shared per-trial data.
struct Exp1Config {
  int n = 100;
  int m = 300;
  int num_blocks = 75;
  int block_size = 4;
  int k_active = 20;
  double amplitude = 1.0;
  std::vector<double> beta_grid = {-0.99, -0.9, -0.7, -0.5, -0.3, 0.0,
                                   0.3,   0.5,  0.7,  0.9,  0.95, 0.99};
  int trials = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  bool record_timing = true;
  // Noiseless runs prune harder than the library default. Spurious blocks
  // otherwise hover at tiny variance scales forever and smear the estimate,
  // while genuinely weak blocks survive under a learned correlation model
  // because the B^-1 trace amplifies their variance estimate.
  SolverKnobs solver{500, 1e-6, 1e-3, LambdaDenominator::kColumns};

  static Exp1Config from_map(std::map<std::string, std::string> config);
};

SweepTable run_experiment1(const Exp1Config& config);

// Joint-recovery sweep over the inter-vector correlation, comparing the
// correlation-aware solver against the correlation-blind one on shared data.
struct Exp2Config {
  int n = 25;
  int m = 125;
  int l = 4;
  int k = 18;
  std::vector<double> rho_grid = {-0.99, -0.9, -0.7, -0.5, -0.3, 0.0,
                                  0.3,   0.5,  0.7,  0.9,  0.99};
  int trials = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  bool record_timing = true;
  SolverKnobs solver;

  static Exp2Config from_map(std::map<std::string, std::string> config);
};

SweepTable run_experiment2(const Exp2Config& config);

// Time-varying-support recovery: both solvers at each window size, all four
// combinations on shared noisy data. Event columns are 0-based; the events
// string uses entries like "15+10" (add 10 rows) and "25-5" (remove 5).
struct Exp3Config {
  int n = 60;
  int m = 256;
  int t = 50;
  int initial_k = 15;
  std::string events = "15+10,25-5";
  double ar_lo = 0.7;
  double ar_hi = 0.99;
  int max_duration = 20;
  double snr_db = 20.0;
  std::vector<int> windows = {2, 5};
  int trials = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  bool record_timing = true;
  // The noisy experiment needs the solver to sparsify: the noise level is
  // learned against the measurement count and the pruning threshold is
  // raised, otherwise spurious rows linger for the whole run.
  SolverKnobs solver{500, 1e-4, 1e-3, LambdaDenominator::kRows};

  static Exp3Config from_map(std::map<std::string, std::string> config);
};

SweepTable run_experiment3(const Exp3Config& config);

// Support-recovery error-rate sweep over the measurement count, with the
// c(W)-derived threshold attached to every row.
struct LimitsConfig {
  MatrixXd w;  // default: ones(k, l)
  int k = 2;
  int l = 1;
  int m = 32;
  std::vector<int> n_grid = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15,
                             16};
  double sigma_phi_sq = 1.0;
  double sigma_v_sq = 0.1;
  int trials = 500;
  std::uint64_t seed = 1;
  int threads = 1;

  static LimitsConfig from_map(std::map<std::string, std::string> config);
};

struct LimitsRow {
  int n = 0;
  double error_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int threshold_n = 0;
};

struct LimitsTable {
  LimitsReport report;
  std::vector<LimitsRow> rows;
};

LimitsTable run_limits_sweep(const LimitsConfig& config);

std::string limits_csv(const LimitsTable& table);
void write_limits_csv(const std::string& path, const LimitsTable& table);

// Parsing helpers shared by the config loaders and the CLI. All throw
// std::invalid_argument with the key name on malformed input.
int parse_int(const std::string& key, const std::string& value);
double parse_double(const std::string& key, const std::string& value);
bool parse_bool(const std::string& key, const std::string& value);
std::uint64_t parse_u64(const std::string& key, const std::string& value);
std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value);
std::vector<int> parse_int_list(const std::string& key,
                                const std::string& value);

}  // namespace corrsbl
