#include "corrsbl/linmodel.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <utility>

namespace corrsbl {

BlockPartition::BlockPartition(std::vector<int> sizes)
    : sizes_(std::move(sizes)) {
  if (sizes_.empty())
    throw std::invalid_argument("BlockPartition: no blocks given");
  offsets_.reserve(sizes_.size());
  for (int d : sizes_) {
    if (d < 1) throw std::invalid_argument("BlockPartition: block size < 1");
    offsets_.push_back(total_);
    total_ += d;
  }
}

BlockPartition BlockPartition::uniform(int num_blocks, int block_size) {
  if (num_blocks < 1)
    throw std::invalid_argument("BlockPartition: num_blocks < 1");
  return BlockPartition(
      std::vector<int>(static_cast<std::size_t>(num_blocks), block_size));
}

Dictionary::Dictionary(MatrixXd phi) : phi_(std::move(phi)) {
  if (phi_.rows() < 1 || phi_.cols() < 1)
    throw std::invalid_argument("Dictionary: empty matrix");
  if (phi_.rows() > phi_.cols())
    throw std::invalid_argument("Dictionary: requires N <= M");
  for (int j = 0; j < phi_.cols(); ++j) {
    if (phi_.col(j).isZero(0.0))
      throw std::invalid_argument("Dictionary: all-zero column " +
                                  std::to_string(j));
  }
}

MatrixXd ar1_correlation(int d, double r) {
  MatrixXd b(d, d);
  for (int i = 0; i < d; ++i) {
    b(i, i) = 1.0;
    for (int j = i + 1; j < d; ++j) {
      double v = std::pow(r, j - i);
      b(i, j) = v;
      b(j, i) = v;
    }
  }
  return b;
}

BlockPrior BlockPrior::ar1(VectorXd gammas, double corr_coeff,
                           const BlockPartition& partition) {
  if (gammas.size() != partition.num_blocks())
    throw std::invalid_argument("BlockPrior: gamma count != block count");
  if ((gammas.array() < 0.0).any())
    throw std::invalid_argument("BlockPrior: negative gamma");
  if (std::abs(corr_coeff) > 0.99)
    throw std::invalid_argument("BlockPrior: |corr_coeff| > 0.99");
  BlockPrior prior;
  prior.gammas_ = std::move(gammas);
  prior.corr_coeff_ = corr_coeff;
  prior.corr_blocks_.reserve(static_cast<std::size_t>(partition.num_blocks()));
  for (int i = 0; i < partition.num_blocks(); ++i)
    prior.corr_blocks_.push_back(ar1_correlation(partition.size(i), corr_coeff));
  return prior;
}

BlockPrior BlockPrior::with_blocks(VectorXd gammas,
                                   std::vector<MatrixXd> corr_blocks) {
  if (gammas.size() != static_cast<Eigen::Index>(corr_blocks.size()))
    throw std::invalid_argument("BlockPrior: gamma count != block count");
  if ((gammas.array() < 0.0).any())
    throw std::invalid_argument("BlockPrior: negative gamma");
  for (const MatrixXd& b : corr_blocks) {
    if (b.rows() != b.cols())
      throw std::invalid_argument("BlockPrior: non-square correlation block");
    if (!b.isApprox(b.transpose(), 1e-12))
      throw std::invalid_argument("BlockPrior: non-symmetric correlation block");
    Eigen::LLT<MatrixXd> llt(b);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument(
          "BlockPrior: correlation block not positive definite");
  }
  BlockPrior prior;
  prior.gammas_ = std::move(gammas);
  prior.corr_coeff_ = 0.0;
  prior.corr_blocks_ = std::move(corr_blocks);
  return prior;
}

int BlockPrior::total_dim() const {
  int total = 0;
  for (const MatrixXd& b : corr_blocks_) total += static_cast<int>(b.rows());
  return total;
}

GaussianPosterior::GaussianPosterior(BlockPartition partition, VectorXd mean,
                                     std::vector<MatrixXd> block_cov)
    : partition_(std::move(partition)),
      mean_(std::move(mean)),
      block_cov_(std::move(block_cov)) {
  if (mean_.size() != partition_.total())
    throw std::invalid_argument("GaussianPosterior: mean length mismatch");
  if (static_cast<int>(block_cov_.size()) != partition_.num_blocks())
    throw std::invalid_argument("GaussianPosterior: block count mismatch");
}

namespace {

void check_model(const Dictionary& dict, const BlockPrior& prior,
                 const BlockPartition& partition) {
  if (partition.total() != dict.m())
    throw std::invalid_argument("partition total != dictionary columns");
  if (prior.num_blocks() != partition.num_blocks())
    throw std::invalid_argument("prior block count != partition block count");
  if (prior.total_dim() != partition.total())
    throw std::invalid_argument("prior dimension != partition total");
}

// Factorizes S (symmetric) in place with the one-shot jitter fallback.
Eigen::LLT<MatrixXd> factorize_spd(MatrixXd& s) {
  Eigen::LLT<MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    double jitter = 1e-12 * s.trace() / static_cast<double>(s.rows());
    s.diagonal().array() += jitter;
    llt.compute(s);
    if (llt.info() != Eigen::Success)
      throw IllConditionedError(
          "posterior: lambda I + Phi Sigma0 Phi^T is not positive definite");
  }
  return llt;
}

}  // namespace

MatrixXd build_sigma0(const BlockPrior& prior, const BlockPartition& partition) {
  if (prior.num_blocks() != partition.num_blocks())
    throw std::invalid_argument("build_sigma0: prior/partition block mismatch");
  if (prior.total_dim() != partition.total())
    throw std::invalid_argument("build_sigma0: prior/partition dim mismatch");
  MatrixXd sigma0 = MatrixXd::Zero(partition.total(), partition.total());
  for (int i = 0; i < partition.num_blocks(); ++i) {
    int off = partition.offset(i), d = partition.size(i);
    sigma0.block(off, off, d, d) = prior.gamma(i) * prior.corr_block(i);
  }
  return sigma0;
}

GaussianPosterior posterior(const Dictionary& dict, const VectorXd& y,
                            double lambda, const BlockPrior& prior,
                            const BlockPartition& partition, double* nll_out) {
  check_model(dict, prior, partition);
  if (y.size() != dict.n())
    throw std::invalid_argument("posterior: y length != N");
  if (lambda < 0.0) throw std::invalid_argument("posterior: lambda < 0");

  const int n = dict.n();
  const int g = partition.num_blocks();
  const MatrixXd& phi = dict.phi();

  std::vector<int> active;
  active.reserve(static_cast<std::size_t>(g));
  int m_act = 0;
  for (int i = 0; i < g; ++i) {
    if (prior.gamma(i) > 0.0) {
      active.push_back(i);
      m_act += partition.size(i);
    }
  }

  VectorXd mean = VectorXd::Zero(partition.total());
  std::vector<MatrixXd> blocks(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i)
    blocks[static_cast<std::size_t>(i)] =
        MatrixXd::Zero(partition.size(i), partition.size(i));

  if (m_act == 0) {
    // Zero prior: mu = 0, Sigma = 0. The marginal is N(0, lambda I).
    if (nll_out) {
      if (lambda <= 0.0)
        throw IllConditionedError("posterior: zero prior with lambda = 0");
      *nll_out = n * std::log(lambda) + y.squaredNorm() / lambda;
    }
    return GaussianPosterior(partition, std::move(mean), std::move(blocks));
  }

  // A = Sigma0 Phi^T restricted to active blocks (rows grouped per block).
  MatrixXd a_act(m_act, n);
  {
    int row = 0;
    for (int i : active) {
      int off = partition.offset(i), d = partition.size(i);
      a_act.middleRows(row, d).noalias() =
          prior.gamma(i) *
          (prior.corr_block(i) * phi.middleCols(off, d).transpose());
      row += d;
    }
  }

  // S = lambda I + Phi_act A_act, built as a symmetric product.
  MatrixXd s(n, n);
  {
    int row = 0;
    s.setZero();
    for (int i : active) {
      int off = partition.offset(i), d = partition.size(i);
      s.noalias() += phi.middleCols(off, d) * a_act.middleRows(row, d);
      row += d;
    }
    s = 0.5 * (s + s.transpose());
    s.diagonal().array() += lambda;
  }
  Eigen::LLT<MatrixXd> llt = factorize_spd(s);

  VectorXd rhs = llt.solve(y);
  // W = L^{-1} A_act^T, so A_i S^{-1} A_i^T = W_i^T W_i.
  MatrixXd w = llt.matrixL().solve(a_act.transpose());

  {
    int row = 0;
    for (int i : active) {
      int off = partition.offset(i), d = partition.size(i);
      mean.segment(off, d).noalias() = a_act.middleRows(row, d) * rhs;
      MatrixXd& blk = blocks[static_cast<std::size_t>(i)];
      blk.noalias() = prior.gamma(i) * prior.corr_block(i);
      blk.noalias() -= w.middleCols(row, d).transpose() * w.middleCols(row, d);
      blk = 0.5 * (blk + blk.transpose());
      row += d;
    }
  }

  if (nll_out) {
    double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    *nll_out = logdet + y.dot(rhs);
  }
  return GaussianPosterior(partition, std::move(mean), std::move(blocks));
}

double neg_log_likelihood(const Dictionary& dict, const VectorXd& y,
                          double lambda, const BlockPrior& prior,
                          const BlockPartition& partition) {
  double nll = 0.0;
  posterior(dict, y, lambda, prior, partition, &nll);
  return nll;
}

MatrixXd posterior_dense_cov(const Dictionary& dict, double lambda,
                             const BlockPrior& prior,
                             const BlockPartition& partition) {
  check_model(dict, prior, partition);
  MatrixXd sigma0 = build_sigma0(prior, partition);
  MatrixXd a = sigma0 * dict.phi().transpose();  // M x N
  MatrixXd sy = dict.phi() * a;                  // N x N
  sy = 0.5 * (sy + sy.transpose());
  sy.diagonal().array() += lambda;
  Eigen::LLT<MatrixXd> llt = factorize_spd(sy);
  MatrixXd cov = sigma0 - a * llt.solve(a.transpose());
  return 0.5 * (cov + cov.transpose());
}

}  // namespace corrsbl
