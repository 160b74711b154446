// Seeded generators for dictionaries, block-sparse and row-sparse signals,
// event-driven time-varying supports and measurement noise. All draws go
// through mt19937_64 seeded via derive_seed, so outputs are reproducible for
// a given seed on a given platform.

#include "corrsbl/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "corrsbl/rng.hpp"

namespace corrsbl {

namespace {

// Stationary unit-variance AR(1): x_0 ~ N(0,1),
// x_{j+1} = beta x_j + sqrt(1 - beta^2) eps_j.
VectorXd ar1_sequence(int len, double beta, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd x(len);
  x[0] = normal(rng);
  const double innov = std::sqrt(1.0 - beta * beta);
  for (int j = 1; j < len; ++j) {
    x[j] = beta * x[j - 1] + innov * normal(rng);
  }
  return x;
}

// First k entries of a partial Fisher-Yates shuffle of [0, m), in draw order.
std::vector<int> sample_without_replacement(int m, int k, std::mt19937_64& rng) {
  std::vector<int> pool(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) pool[static_cast<std::size_t>(i)] = i;
  std::vector<int> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, m - 1);
    std::swap(pool[static_cast<std::size_t>(i)],
              pool[static_cast<std::size_t>(pick(rng))]);
    out[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace

Dictionary gen_dictionary(int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1) {
    throw std::invalid_argument("dictionary dimensions must be positive");
  }
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd phi(n, m);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < m; ++c) phi(r, c) = normal(rng);
  }
  for (int c = 0; c < m; ++c) {
    const double norm = phi.col(c).norm();
    if (norm == 0.0) {
      throw std::runtime_error("drawn dictionary column is zero");
    }
    phi.col(c) /= norm;
  }
  return Dictionary(std::move(phi));
}

BlockSignal gen_block_signal(const BlockPartition& partition, int k_active,
                             double beta, double amplitude,
                             std::uint64_t seed) {
  const int g = partition.num_blocks();
  if (k_active < 0 || k_active > g) {
    throw std::invalid_argument("active block count must lie in [0, g]");
  }
  if (!(std::abs(beta) < 1.0)) {
    throw std::invalid_argument("AR coefficient magnitude must be below 1");
  }
  auto rng = make_rng(seed);

  BlockSignal out;
  out.x = VectorXd::Zero(partition.total());
  out.active_blocks = sample_without_replacement(g, k_active, rng);
  std::sort(out.active_blocks.begin(), out.active_blocks.end());
  for (int b : out.active_blocks) {
    out.x.segment(partition.offset(b), partition.size(b)) =
        amplitude * ar1_sequence(partition.size(b), beta, rng);
  }
  return out;
}

MmvSignal gen_mmv_signal(int m, int l, int k, double rho, std::uint64_t seed) {
  if (m < 1 || l < 1) {
    throw std::invalid_argument("signal dimensions must be positive");
  }
  if (k < 0 || k > m) {
    throw std::invalid_argument("support size must lie in [0, M]");
  }
  if (!(std::abs(rho) < 1.0)) {
    throw std::invalid_argument("AR coefficient magnitude must be below 1");
  }
  auto rng = make_rng(seed);

  MmvSignal out;
  out.x = MatrixXd::Zero(m, l);
  out.support = sample_without_replacement(m, k, rng);
  std::sort(out.support.begin(), out.support.end());
  for (int r : out.support) {
    out.x.row(r) = ar1_sequence(l, rho, rng).transpose();
  }
  return out;
}

void TvSignalSpec::validate() const {
  if (m < 1 || t < 1) {
    throw std::invalid_argument("signal dimensions must be positive");
  }
  if (max_duration < 1) {
    throw std::invalid_argument("duration cap must be positive");
  }
  if (!(ar_lo > -1.0) || !(ar_hi < 1.0) || ar_lo > ar_hi) {
    throw std::invalid_argument("AR coefficient range must lie inside (-1, 1)");
  }

  // Ledger check: removals must target rows added earlier and still
  // ledger-active, additions must be fresh rows, and at least one row must
  // remain ledger-active after every event. The duration cap is ignored here.
  std::set<int> active;
  std::set<int> ever_added;
  int last_col = -1;
  for (const TvEvent& ev : events) {
    if (ev.start_col <= last_col) {
      throw std::invalid_argument("event columns must be strictly increasing");
    }
    if (ev.start_col < 0 || ev.start_col >= t) {
      throw std::invalid_argument("event column must lie in [0, T)");
    }
    last_col = ev.start_col;

    std::set<int> seen;
    for (int r : ev.rows_removed) {
      if (r < 0 || r >= m) throw std::invalid_argument("row index out of range");
      if (!seen.insert(r).second) {
        throw std::invalid_argument("event lists a row twice");
      }
      if (active.erase(r) == 0) {
        throw std::invalid_argument("removal targets a row that is not active");
      }
    }
    for (int r : ev.rows_added) {
      if (r < 0 || r >= m) throw std::invalid_argument("row index out of range");
      if (!seen.insert(r).second) {
        throw std::invalid_argument("event lists a row twice");
      }
      if (!ever_added.insert(r).second) {
        throw std::invalid_argument("row is added more than once");
      }
      active.insert(r);
    }
    if (active.empty()) {
      throw std::invalid_argument("no row remains active after an event");
    }
  }
  if (events.empty() || active.empty()) {
    throw std::invalid_argument("schedule must keep at least one row active");
  }
}

TvSignal gen_tv_signal(const TvSignalSpec& spec, std::uint64_t seed) {
  spec.validate();
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> coeff(spec.ar_lo, spec.ar_hi);

  TvSignal out;
  out.x = MatrixXd::Zero(spec.m, spec.t);
  out.supports.assign(static_cast<std::size_t>(spec.t), {});

  // Explicit removal column per row, taken from the event ledger.
  auto removal_col = [&](int row, std::size_t after_event) {
    for (std::size_t e = after_event + 1; e < spec.events.size(); ++e) {
      const TvEvent& ev = spec.events[e];
      if (std::find(ev.rows_removed.begin(), ev.rows_removed.end(), row) !=
          ev.rows_removed.end()) {
        return ev.start_col;
      }
    }
    return std::numeric_limits<int>::max();
  };

  for (std::size_t e = 0; e < spec.events.size(); ++e) {
    const TvEvent& ev = spec.events[e];
    for (int row : ev.rows_added) {
      const int start = ev.start_col;
      const int end = std::min({removal_col(row, e), start + spec.max_duration,
                                spec.t});
      const int len = end - start;
      if (len <= 0) continue;
      const double beta = coeff(rng);
      out.x.row(row).segment(start, len) =
          ar1_sequence(len, beta, rng).transpose();
      for (int c = start; c < end; ++c) {
        out.supports[static_cast<std::size_t>(c)].push_back(row);
      }
    }
  }
  for (auto& cols : out.supports) std::sort(cols.begin(), cols.end());
  return out;
}

TvSignalSpec random_tv_spec(int m, int t, int initial_k,
                            const std::vector<TvCountEvent>& changes,
                            double ar_lo, double ar_hi, int max_duration,
                            std::uint64_t seed) {
  if (m < 1 || t < 1) {
    throw std::invalid_argument("signal dimensions must be positive");
  }
  if (initial_k < 1 || initial_k > m) {
    throw std::invalid_argument("initial support size must lie in [1, M]");
  }
  auto rng = make_rng(seed);

  TvSignalSpec spec;
  spec.m = m;
  spec.t = t;
  spec.ar_lo = ar_lo;
  spec.ar_hi = ar_hi;
  spec.max_duration = max_duration;

  std::vector<int> unused(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) unused[static_cast<std::size_t>(i)] = i;
  auto take_unused = [&](int count) {
    if (count > static_cast<int>(unused.size())) {
      throw std::invalid_argument("schedule exhausts the row pool");
    }
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      std::uniform_int_distribution<int> pick(
          0, static_cast<int>(unused.size()) - 1);
      const std::size_t at = static_cast<std::size_t>(pick(rng));
      out.push_back(unused[at]);
      unused.erase(unused.begin() + static_cast<std::ptrdiff_t>(at));
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  struct Segment {
    int row;
    int start;
    int explicit_end;  // removal column, or INT_MAX
  };
  std::vector<Segment> segments;
  auto alive_at = [&](int col) {
    std::vector<int> rows;
    for (const Segment& s : segments) {
      const int end = std::min(s.explicit_end, s.start + max_duration);
      if (s.start <= col && col < end) rows.push_back(s.row);
    }
    std::sort(rows.begin(), rows.end());
    return rows;
  };

  TvEvent first;
  first.start_col = 0;
  first.rows_added = take_unused(initial_k);
  for (int r : first.rows_added) {
    segments.push_back(Segment{r, 0, std::numeric_limits<int>::max()});
  }
  spec.events.push_back(std::move(first));

  std::vector<TvCountEvent> ordered = changes;
  std::sort(ordered.begin(), ordered.end(),
            [](const TvCountEvent& a, const TvCountEvent& b) {
              return a.start_col < b.start_col;
            });
  for (const TvCountEvent& ch : ordered) {
    if (ch.start_col <= 0 || ch.start_col >= t) {
      throw std::invalid_argument("change column must lie in (0, T)");
    }
    if (ch.added < 0 || ch.removed < 0 || ch.added + ch.removed == 0) {
      throw std::invalid_argument("change must add or remove at least one row");
    }
    TvEvent ev;
    ev.start_col = ch.start_col;
    if (ch.removed > 0) {
      // Sample removals from the rows actually alive at this column, so the
      // explicit removal always cuts a running segment short.
      std::vector<int> alive = alive_at(ch.start_col);
      if (static_cast<int>(alive.size()) < ch.removed) {
        throw std::invalid_argument("not enough active rows to remove");
      }
      std::vector<int> picked =
          sample_without_replacement(static_cast<int>(alive.size()), ch.removed,
                                     rng);
      for (int p : picked) {
        ev.rows_removed.push_back(alive[static_cast<std::size_t>(p)]);
      }
      std::sort(ev.rows_removed.begin(), ev.rows_removed.end());
      for (int r : ev.rows_removed) {
        for (Segment& s : segments) {
          if (s.row == r) s.explicit_end = std::min(s.explicit_end, ch.start_col);
        }
      }
    }
    if (ch.added > 0) {
      ev.rows_added = take_unused(ch.added);
      for (int r : ev.rows_added) {
        segments.push_back(
            Segment{r, ch.start_col, std::numeric_limits<int>::max()});
      }
    }
    spec.events.push_back(std::move(ev));
  }

  spec.validate();
  return spec;
}

TvSignalSpec default_tv_spec(std::uint64_t seed) {
  return random_tv_spec(256, 50, 15, {{15, 10, 0}, {25, 0, 5}}, 0.7, 0.99, 20,
                        seed);
}

NoisyMeasurements add_noise(const MatrixXd& clean, double snr_db,
                            std::uint64_t seed) {
  NoisyMeasurements out;
  out.y = clean;
  if (std::isinf(snr_db) && snr_db > 0.0) {
    out.sigma_v_sq = 0.0;
    return out;
  }
  if (!std::isfinite(snr_db)) {
    throw std::invalid_argument("SNR must be finite or +infinity");
  }
  const double mean_sq = clean.squaredNorm() / static_cast<double>(clean.size());
  if (mean_sq == 0.0) {
    throw std::invalid_argument("cannot set an SNR for an all-zero signal");
  }
  out.sigma_v_sq = mean_sq * std::pow(10.0, -snr_db / 10.0);
  const double sd = std::sqrt(out.sigma_v_sq);
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index r = 0; r < out.y.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.y.cols(); ++c) {
      out.y(r, c) += sd * normal(rng);
    }
  }
  return out;
}

}  // namespace corrsbl
