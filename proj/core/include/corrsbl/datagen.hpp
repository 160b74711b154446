#pragma once

#include <cstdint>
#include <vector>

#include "corrsbl/linmodel.hpp"

namespace corrsbl {

// i.i.d. standard Gaussian entries, each column scaled to unit norm.
Dictionary gen_dictionary(int n, int m, std::uint64_t seed);

struct BlockSignal {
  VectorXd x;
  std::vector<int> active_blocks;  // sorted
};

// k_active blocks drawn uniformly; entries of each active block follow a
// stationary unit-variance AR(1) with coefficient beta, scaled by amplitude.
BlockSignal gen_block_signal(const BlockPartition& partition, int k_active,
                             double beta, double amplitude,
                             std::uint64_t seed);

struct MmvSignal {
  MatrixXd x;  // M x L
  std::vector<int> support;  // sorted
};

// K rows drawn uniformly; each nonzero row is a stationary unit-variance
// AR(1) sequence of length L with coefficient rho, rows independent.
MmvSignal gen_mmv_signal(int m, int l, int k, double rho, std::uint64_t seed);

struct TvEvent {
  int start_col = 0;
  std::vector<int> rows_added;
  std::vector<int> rows_removed;
};

// Event-driven support schedule. Rows activate at their add event and stay
// active until an explicit removal or until max_duration columns have
// elapsed, whichever comes first. The ledger invariants (strictly increasing
// event columns, removals target rows added earlier and not yet removed, no
// re-activation, at least one ledger-active row after every event) ignore the
// duration cap; the cap applies at generation time only.
struct TvSignalSpec {
  int m = 256;
  int t = 50;
  std::vector<TvEvent> events;
  double ar_lo = 0.7;
  double ar_hi = 0.99;
  int max_duration = 20;

  void validate() const;
};

struct TvSignal {
  MatrixXd x;  // M x T
  std::vector<std::vector<int>> supports;  // per column, sorted nonzero rows
};

// Each active row carries one AR(1) segment (stationary, unit variance) with
// a per-row coefficient drawn uniformly from [ar_lo, ar_hi].
TvSignal gen_tv_signal(const TvSignalSpec& spec, std::uint64_t seed);

// Count-level support change: `added` new rows turn on and `removed`
// currently-active rows turn off at start_col.
struct TvCountEvent {
  int start_col = 0;
  int added = 0;
  int removed = 0;
};

// Draws explicit row sets for a count-level schedule: initial_k rows active
// from column 0, then each count event picks fresh rows to add and samples
// its removals from the rows alive (duration cap included) at that column.
TvSignalSpec random_tv_spec(int m, int t, int initial_k,
                            const std::vector<TvCountEvent>& changes,
                            double ar_lo, double ar_hi, int max_duration,
                            std::uint64_t seed);

// The stock schedule: M=256, T=50, 15 rows from column 0, 10 new rows at
// column 15, 5 of the then-active rows removed at column 25, AR coefficients
// in [0.7, 0.99], durations capped at 20 columns.
TvSignalSpec default_tv_spec(std::uint64_t seed);

struct NoisyMeasurements {
  MatrixXd y;
  double sigma_v_sq = 0.0;
};

// Adds i.i.d. Gaussian noise with sigma_v^2 = mean(clean^2) * 10^(-snr/10).
// An infinite snr_db returns the input unchanged with sigma_v^2 = 0.
NoisyMeasurements add_noise(const MatrixXd& clean, double snr_db,
                            std::uint64_t seed);

}  // namespace corrsbl
