#pragma once

#include <optional>
#include <vector>

#include "corrsbl/linmodel.hpp"

namespace corrsbl {

// Denominator of the noise-level update: total coefficient count (columns of
// Phi) or measurement count (rows). Both appear in the literature; columns is
// the default here.
enum class LambdaDenominator { kColumns, kRows };

struct BsblOptions {
  bool learn_corr = true;
  bool learn_lambda = true;
  // Starting noise level when learning; defaults to 1e-3 * mean(y^2).
  std::optional<double> lambda_init;
  // Holds the noise level fixed for the whole run and disables learning.
  std::optional<double> lambda_fixed;
  // With learn_lambda off and no lambda_fixed, the solver runs in noiseless
  // mode with lambda = 1e-10 * mean(y^2).
  int max_iters = 500;
  double tol = 1e-6;
  // Blocks whose gamma falls below prune_gamma * max(gamma) are pinned to
  // zero for the rest of the run. Relative threshold; 0 disables pruning.
  double prune_gamma = 1e-8;
  LambdaDenominator lambda_denominator = LambdaDenominator::kColumns;
  // Fixed per-block correlation matrices (e.g. from build_kron_prior).
  // Requires learn_corr = false; sizes must match the partition.
  std::optional<std::vector<MatrixXd>> fixed_corr;

  void validate() const;
};

struct RecoveryResult {
  VectorXd x_hat;
  VectorXd gammas;
  double corr_coeff = 0.0;
  double lambda = 0.0;
  std::vector<double> cost_trajectory;  // one entry per iteration
  int iters = 0;
  bool converged = false;
};

// gamma_i <- (1/d_i) Tr[B_i^{-1} (Sigma_x^i + mu_x^i mu_x^i^T)].
// Blocks with zero posterior stay at exactly zero.
VectorXd update_gamma(const GaussianPosterior& post, const BlockPrior& prior,
                      const BlockPartition& partition);

// lambda <- (||y - Phi mu||^2 + sum_i Tr(Sigma_x^i Phi_i^T Phi_i)) / denom
// where denom is the column or row count of Phi.
double update_lambda(const Dictionary& dict, const VectorXd& y,
                     const GaussianPosterior& post,
                     const BlockPartition& partition, LambdaDenominator denom);

// Pooled AR(1) coefficient from the scaled second moments of the active
// blocks (gamma_i > 0, d_i >= 2): per block Bbar_i = (Sigma_x^i +
// mu_x^i mu_x^i^T)/gamma_i, m0 sums the main-diagonal means, m1 the first
// sub-diagonal means; the ratio m1/m0 is clipped to |r| <= 0.99. Returns
// current_corr unchanged when no block is eligible or m0 vanishes. The caller
// rebuilds each B_i as Toeplitz([1, r, ..., r^{d_i-1}]).
double update_corr(const GaussianPosterior& post, const VectorXd& gammas,
                   const BlockPartition& partition, double current_corr);

// Block-sparse Bayesian recovery: alternates the posterior computation with
// the gamma / lambda / correlation updates until the largest relative gamma
// change drops to tol or max_iters is hit. Requires N < M.
RecoveryResult bsbl_em(const Dictionary& dict, const VectorXd& y,
                       const BlockPartition& partition,
                       const BsblOptions& options);

}  // namespace corrsbl
