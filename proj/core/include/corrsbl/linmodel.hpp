// Linear measurement model: block partitions, dictionaries, block-diagonal
// Gaussian priors and the posterior computations shared by all solvers.
//
// The posterior is always evaluated in its dual form,
//   mu    = Sigma0 Phi^T (lambda I + Phi Sigma0 Phi^T)^{-1} y
//   Sigma = Sigma0 - Sigma0 Phi^T (lambda I + Phi Sigma0 Phi^T)^{-1} Phi Sigma0,
// which only factorizes an N x N matrix and handles gamma_i = 0 blocks
// exactly (their mean and covariance come out identically zero).

#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace corrsbl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Thrown when (lambda I + Phi Sigma0 Phi^T) cannot be factorized even after
// the one-shot jitter fallback.
class IllConditionedError : public std::runtime_error {
 public:
  explicit IllConditionedError(const std::string& what)
      : std::runtime_error(what) {}
};

// Ordered block sizes partitioning a length-M coefficient vector.
class BlockPartition {
 public:
  explicit BlockPartition(std::vector<int> sizes);

  // g equal blocks of size d.
  static BlockPartition uniform(int num_blocks, int block_size);

  int num_blocks() const { return static_cast<int>(sizes_.size()); }
  int size(int i) const { return sizes_[static_cast<std::size_t>(i)]; }
  int offset(int i) const { return offsets_[static_cast<std::size_t>(i)]; }
  int total() const { return total_; }
  const std::vector<int>& sizes() const { return sizes_; }

  bool operator==(const BlockPartition& other) const {
    return sizes_ == other.sizes_;
  }

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int total_ = 0;
};

// Known N x M measurement matrix. Requires N <= M and no all-zero column;
// solver entry points additionally require N < M.
class Dictionary {
 public:
  explicit Dictionary(MatrixXd phi);

  const MatrixXd& phi() const { return phi_; }
  int n() const { return static_cast<int>(phi_.rows()); }
  int m() const { return static_cast<int>(phi_.cols()); }

 private:
  MatrixXd phi_;
};

// Toeplitz correlation matrix [r^{|i-j|}]_{i,j < d}.
MatrixXd ar1_correlation(int d, double r);

// Block-diagonal Gaussian prior: block i has covariance gamma_i * B_i.
// B_i is either the shared-coefficient AR(1) Toeplitz matrix or a
// caller-supplied fixed positive-definite matrix.
class BlockPrior {
 public:
  // B_i = Toeplitz([1, r, ..., r^{d_i-1}]) for every block. |r| <= 0.99.
  static BlockPrior ar1(VectorXd gammas, double corr_coeff,
                        const BlockPartition& partition);

  // Caller-supplied fixed correlation blocks (checked symmetric PD).
  static BlockPrior with_blocks(VectorXd gammas,
                                std::vector<MatrixXd> corr_blocks);

  int num_blocks() const { return static_cast<int>(gammas_.size()); }
  const VectorXd& gammas() const { return gammas_; }
  double gamma(int i) const { return gammas_[i]; }
  double corr_coeff() const { return corr_coeff_; }
  const MatrixXd& corr_block(int i) const {
    return corr_blocks_[static_cast<std::size_t>(i)];
  }
  // Dimension implied by the correlation blocks.
  int total_dim() const;

 private:
  BlockPrior() = default;
  VectorXd gammas_;
  double corr_coeff_ = 0.0;
  std::vector<MatrixXd> corr_blocks_;
};

// Posterior mean plus the per-block diagonal of the posterior covariance.
// Blocks with gamma_i = 0 are exactly zero.
class GaussianPosterior {
 public:
  GaussianPosterior(BlockPartition partition, VectorXd mean,
                    std::vector<MatrixXd> block_cov);

  const BlockPartition& partition() const { return partition_; }
  const VectorXd& mean() const { return mean_; }
  Eigen::VectorBlock<const VectorXd> mean_block(int i) const {
    return mean_.segment(partition_.offset(i), partition_.size(i));
  }
  const MatrixXd& cov_block(int i) const {
    return block_cov_[static_cast<std::size_t>(i)];
  }
  const std::vector<MatrixXd>& block_covs() const { return block_cov_; }

 private:
  BlockPartition partition_;
  VectorXd mean_;
  std::vector<MatrixXd> block_cov_;
};

// Assembles the full M x M block-diagonal prior covariance Sigma0.
// Off-block entries are exactly zero.
MatrixXd build_sigma0(const BlockPrior& prior, const BlockPartition& partition);

// Dual-form posterior. lambda = 0 is permitted only when Phi Sigma0 Phi^T is
// full rank. If nll_out is non-null it receives
// log|Sigma_y| + y^T Sigma_y^{-1} y with Sigma_y = lambda I + Phi Sigma0 Phi^T.
GaussianPosterior posterior(const Dictionary& dict, const VectorXd& y,
                            double lambda, const BlockPrior& prior,
                            const BlockPartition& partition,
                            double* nll_out = nullptr);

// Negative log-likelihood of the Type-II objective,
// log|Sigma_y| + y^T Sigma_y^{-1} y.
double neg_log_likelihood(const Dictionary& dict, const VectorXd& y,
                          double lambda, const BlockPrior& prior,
                          const BlockPartition& partition);

// Full posterior covariance Sigma0 - Sigma0 Phi^T Sigma_y^{-1} Phi Sigma0,
// materialized densely. Intended for small problems and validation; the
// solvers only ever consume the per-block diagonal.
MatrixXd posterior_dense_cov(const Dictionary& dict, double lambda,
                             const BlockPrior& prior,
                             const BlockPartition& partition);

}  // namespace corrsbl
