// Support-recovery limits: the sample-complexity exponent c(W), the
// measurement-count threshold ceil(ln M / c), an exhaustive maximum-likelihood
// support decoder, and a Monte-Carlo driver measuring its error rate.

#include "corrsbl/limits.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "corrsbl/parallel.hpp"
#include "corrsbl/rng.hpp"

namespace corrsbl {

namespace {

// Advances idx to the next size-k subset of [0, n) in lexicographic order.
// Returns false after the last subset.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[static_cast<std::size_t>(i)] < n - k + i) {
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) {
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      }
      return true;
    }
  }
  return false;
}

double binomial_approx(int n, int k) {
  double count = 1.0;
  for (int i = 0; i < k; ++i) {
    count *= static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return count;
}

}  // namespace

SignalValueMatrix::SignalValueMatrix(MatrixXd values) : w(std::move(values)) {
  if (w.rows() < 1 || w.cols() < 1) {
    throw std::invalid_argument("signal value matrix must be nonempty");
  }
  if ((w.array() == 0.0).any()) {
    throw std::invalid_argument("signal value matrix must have no zero entries");
  }
  if (!w.allFinite()) {
    throw std::invalid_argument("signal value matrix must be finite");
  }
}

LimitsReport c_of_w(const SignalValueMatrix& w, double sigma_phi_sq,
                    double sigma_v_sq) {
  if (sigma_phi_sq <= 0.0 || sigma_v_sq <= 0.0) {
    throw std::invalid_argument("variances must be positive");
  }
  const int k = w.k();
  const int l = w.l();
  if (k > 20) {
    throw std::invalid_argument("subset enumeration supports at most 20 rows");
  }
  const double snr = sigma_phi_sq / sigma_v_sq;

  LimitsReport report;
  report.sigma_phi_sq = sigma_phi_sq;
  report.sigma_v_sq = sigma_v_sq;
  report.c_value = std::numeric_limits<double>::infinity();

  for (int size = 1; size <= k; ++size) {
    std::vector<int> idx(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
    do {
      MatrixXd wt(size, l);
      for (int i = 0; i < size; ++i) {
        wt.row(i) = w.w.row(idx[static_cast<std::size_t>(i)]);
      }
      MatrixXd gram = MatrixXd::Identity(l, l) + snr * (wt.transpose() * wt);
      Eigen::LLT<MatrixXd> llt(gram);
      if (llt.info() != Eigen::Success) {
        throw std::runtime_error("subset Gram factorization failed");
      }
      const double logdet =
          2.0 * llt.matrixLLT().diagonal().array().log().sum();
      const double term = logdet / (2.0 * static_cast<double>(size));
      // Ties go to the smaller subset, then lexicographic order; both fall
      // out of the strict comparison and the enumeration order.
      if (term < report.c_value) {
        report.c_value = term;
        report.argmin_subset = idx;
      }
    } while (next_combination(idx, k));
  }
  return report;
}

int threshold_measurements(int m, const LimitsReport& report, double epsilon) {
  if (m < 2) {
    throw std::invalid_argument("dictionary size must exceed 1");
  }
  if (!(report.c_value > 0.0) || !std::isfinite(report.c_value)) {
    throw std::invalid_argument("exponent must be positive and finite");
  }
  if (!(std::abs(epsilon) < report.c_value)) {
    throw std::invalid_argument("|epsilon| must be below the exponent");
  }
  return static_cast<int>(
      std::ceil(std::log(static_cast<double>(m)) / (report.c_value - epsilon)));
}

MlDecodeResult ml_support_decode(const MatrixXd& dict, const MatrixXd& y,
                                 int k) {
  const int n = static_cast<int>(dict.rows());
  const int m = static_cast<int>(dict.cols());
  if (n < 1 || m < 1) {
    throw std::invalid_argument("dictionary must be nonempty");
  }
  if (y.rows() != n || y.cols() < 1) {
    throw std::invalid_argument("measurement rows must match dictionary rows");
  }
  if (k < 1 || k > m) {
    throw std::invalid_argument("support size must lie in [1, M]");
  }
  if (binomial_approx(m, k) > 2e6) {
    throw std::invalid_argument("subset enumeration bound exceeded");
  }

  const MatrixXd gram = dict.transpose() * dict;
  const MatrixXd proj = dict.transpose() * y;
  const double ynorm = y.squaredNorm();

  MlDecodeResult result;
  double best = std::numeric_limits<double>::infinity();
  bool found = false;

  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  MatrixXd gs(k, k);
  MatrixXd cs(k, y.cols());
  do {
    for (int a = 0; a < k; ++a) {
      const int ia = idx[static_cast<std::size_t>(a)];
      cs.row(a) = proj.row(ia);
      for (int b = 0; b < k; ++b) {
        gs(a, b) = gram(ia, idx[static_cast<std::size_t>(b)]);
      }
    }
    Eigen::LLT<MatrixXd> llt(gs);
    if (llt.info() != Eigen::Success ||
        llt.matrixLLT().diagonal().minCoeff() <
            1e-8 * llt.matrixLLT().diagonal().maxCoeff()) {
      ++result.skipped_subsets;
      continue;
    }
    const double fit = cs.cwiseProduct(llt.solve(cs)).sum();
    const double resid = ynorm - fit;
    // Strict comparison keeps the first (lexicographically smallest) support
    // on ties.
    if (resid < best) {
      best = resid;
      result.support = idx;
      found = true;
    }
  } while (next_combination(idx, m));

  if (!found) {
    throw std::runtime_error("all candidate supports are rank-deficient");
  }
  result.residual = std::max(0.0, best);
  return result;
}

WilsonInterval wilson95(int successes, int trials) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw std::invalid_argument("invalid success count");
  }
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double hw =
      z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  WilsonInterval out;
  out.low = std::max(0.0, center - hw);
  out.high = std::min(1.0, center + hw);
  out.halfwidth = hw;
  return out;
}

McResult mc_error_rate(const SignalValueMatrix& w, int m, int n,
                       double sigma_phi_sq, double sigma_v_sq, int trials,
                       std::uint64_t seed, int threads) {
  const int k = w.k();
  const int l = w.l();
  if (m < k) {
    throw std::invalid_argument("dictionary size must be at least the support size");
  }
  if (n < 1) {
    throw std::invalid_argument("measurement count must be positive");
  }
  if (trials < 1) {
    throw std::invalid_argument("trial count must be positive");
  }
  if (sigma_phi_sq <= 0.0 || sigma_v_sq < 0.0) {
    throw std::invalid_argument("variances must be valid");
  }
  if (binomial_approx(m, k) > 2e6) {
    throw std::invalid_argument("subset enumeration bound exceeded");
  }

  std::vector<unsigned char> errors(static_cast<std::size_t>(trials), 0);
  std::vector<long long> skipped(static_cast<std::size_t>(trials), 0);
  const double phi_sd = std::sqrt(sigma_phi_sq);
  const double noise_sd = std::sqrt(sigma_v_sq);

  parallel_for_index(
      static_cast<std::size_t>(trials), threads, [&](std::size_t ti) {
        auto rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(ti)}));
        std::normal_distribution<double> normal(0.0, 1.0);

        // Uniform size-k support: partial Fisher-Yates over [0, m).
        std::vector<int> pool(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) pool[static_cast<std::size_t>(i)] = i;
        std::vector<int> support(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
          std::uniform_int_distribution<int> pick(i, m - 1);
          std::swap(pool[static_cast<std::size_t>(i)],
                    pool[static_cast<std::size_t>(pick(rng))]);
          support[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(i)];
        }

        MatrixXd phi(n, m);
        for (int r = 0; r < n; ++r) {
          for (int c = 0; c < m; ++c) phi(r, c) = phi_sd * normal(rng);
        }

        MatrixXd y = MatrixXd::Zero(n, l);
        for (int j = 0; j < k; ++j) {
          y += phi.col(support[static_cast<std::size_t>(j)]) * w.w.row(j);
        }
        if (noise_sd > 0.0) {
          for (int r = 0; r < n; ++r) {
            for (int c = 0; c < l; ++c) y(r, c) += noise_sd * normal(rng);
          }
        }

        std::vector<int> truth = support;
        std::sort(truth.begin(), truth.end());
        try {
          MlDecodeResult decoded = ml_support_decode(phi, y, k);
          skipped[ti] = decoded.skipped_subsets;
          errors[ti] = decoded.support == truth ? 0 : 1;
        } catch (const std::runtime_error&) {
          // Every candidate support was rank-deficient; count the trial as an
          // error rather than aborting the sweep.
          errors[ti] = 1;
        }
      });

  McResult out;
  out.trials = trials;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    out.errors += errors[i];
    out.skipped_subsets += skipped[i];
  }
  out.error_rate = static_cast<double>(out.errors) / static_cast<double>(trials);
  WilsonInterval ci = wilson95(out.errors, trials);
  out.ci_low = ci.low;
  out.ci_high = ci.high;
  return out;
}

}  // namespace corrsbl
