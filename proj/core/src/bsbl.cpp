#include "corrsbl/bsbl.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "em_loop.hpp"

namespace corrsbl {

void BsblOptions::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("options: tol must be > 0");
  if (max_iters < 1)
    throw std::invalid_argument("options: max_iters must be >= 1");
  if (!(prune_gamma >= 0.0 && prune_gamma < 1.0))
    throw std::invalid_argument("options: prune_gamma must be in [0, 1)");
  if (lambda_init && !(*lambda_init > 0.0))
    throw std::invalid_argument("options: lambda_init must be > 0");
  if (lambda_fixed && !(*lambda_fixed > 0.0))
    throw std::invalid_argument("options: lambda_fixed must be > 0");
  if (fixed_corr) {
    if (learn_corr)
      throw std::invalid_argument(
          "options: fixed correlation blocks require learn_corr off");
    if (fixed_corr->empty())
      throw std::invalid_argument("options: fixed_corr is empty");
  }
}

VectorXd update_gamma(const GaussianPosterior& post, const BlockPrior& prior,
                      const BlockPartition& partition) {
  if (prior.num_blocks() != partition.num_blocks() ||
      post.partition().num_blocks() != partition.num_blocks())
    throw std::invalid_argument("update_gamma: block count mismatch");
  const int g = partition.num_blocks();
  VectorXd out(g);
  for (int i = 0; i < g; ++i) {
    const MatrixXd& cov = post.cov_block(i);
    auto mu = post.mean_block(i);
    if (cov.isZero(0.0) && mu.isZero(0.0)) {
      out[i] = 0.0;
      continue;
    }
    Eigen::LLT<MatrixXd> llt(prior.corr_block(i));
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument(
          "update_gamma: correlation block not positive definite");
    MatrixXd second_moment = cov + mu * mu.transpose();
    double tr = llt.solve(second_moment).trace();
    out[i] = std::max(0.0, tr / partition.size(i));
  }
  return out;
}

double update_lambda(const Dictionary& dict, const VectorXd& y,
                     const GaussianPosterior& post,
                     const BlockPartition& partition,
                     LambdaDenominator denom) {
  if (y.size() != dict.n())
    throw std::invalid_argument("update_lambda: y length != N");
  if (partition.total() != dict.m())
    throw std::invalid_argument("update_lambda: partition total != M");
  VectorXd resid = y - dict.phi() * post.mean();
  double tr = 0.0;
  for (int i = 0; i < partition.num_blocks(); ++i) {
    int off = partition.offset(i), d = partition.size(i);
    auto cols = dict.phi().middleCols(off, d);
    tr += post.cov_block(i).cwiseProduct(cols.transpose() * cols).sum();
  }
  double den = denom == LambdaDenominator::kColumns ? dict.m() : dict.n();
  return (resid.squaredNorm() + tr) / den;
}

double update_corr(const GaussianPosterior& post, const VectorXd& gammas,
                   const BlockPartition& partition, double current_corr) {
  if (gammas.size() != partition.num_blocks() ||
      post.partition().num_blocks() != partition.num_blocks())
    throw std::invalid_argument("update_corr: block count mismatch");
  double m0 = 0.0, m1 = 0.0;
  int eligible = 0;
  for (int i = 0; i < partition.num_blocks(); ++i) {
    const int d = partition.size(i);
    if (d < 2 || !(gammas[i] > 0.0)) continue;
    const MatrixXd& cov = post.cov_block(i);
    auto mu = post.mean_block(i);
    double diag = 0.0, sub = 0.0;
    for (int j = 0; j < d; ++j) diag += cov(j, j) + mu[j] * mu[j];
    for (int j = 0; j + 1 < d; ++j) sub += cov(j + 1, j) + mu[j + 1] * mu[j];
    m0 += diag / (d * gammas[i]);
    m1 += sub / ((d - 1) * gammas[i]);
    ++eligible;
  }
  if (eligible == 0 || m0 == 0.0) return current_corr;
  double ratio = m1 / m0;
  return std::clamp(ratio, -0.99, 0.99);
}

namespace {

// Literal realization of the solver: every iteration reuses the shared dual
// posterior with the per-block prior materialized.
class GeneralEngine {
 public:
  GeneralEngine(const Dictionary& dict, const VectorXd& y,
                const BlockPartition& partition, const BsblOptions& opt)
      : dict_(dict), y_(y), part_(partition) {
    if (y_.size() != dict_.n())
      throw std::invalid_argument("bsbl_em: y length != N");
    if (part_.total() != dict_.m())
      throw std::invalid_argument("bsbl_em: partition total != M");
    if (!y_.allFinite())
      throw std::invalid_argument("bsbl_em: non-finite measurements");
    if (opt.fixed_corr) {
      fixed_blocks_ = *opt.fixed_corr;
      if (static_cast<int>(fixed_blocks_->size()) != part_.num_blocks())
        throw std::invalid_argument(
            "bsbl_em: fixed_corr block count != partition block count");
      for (int i = 0; i < part_.num_blocks(); ++i) {
        if ((*fixed_blocks_)[static_cast<std::size_t>(i)].rows() !=
            part_.size(i))
          throw std::invalid_argument(
              "bsbl_em: fixed_corr block size != partition block size");
      }
    }
    grams_.reserve(static_cast<std::size_t>(part_.num_blocks()));
    for (int i = 0; i < part_.num_blocks(); ++i) {
      auto cols = dict_.phi().middleCols(part_.offset(i), part_.size(i));
      grams_.push_back(cols.transpose() * cols);
    }
  }

  const BlockPartition& partition() const { return part_; }
  double mean_sq_y() const { return y_.squaredNorm() / dict_.n(); }
  bool zero_y() const { return y_.isZero(0.0); }
  double denom_columns() const { return dict_.m(); }
  double denom_rows() const { return dict_.n(); }

  void refresh(const VectorXd& gammas, double corr_coeff, double lambda) {
    if (fixed_blocks_)
      prior_.emplace(BlockPrior::with_blocks(gammas, *fixed_blocks_));
    else
      prior_.emplace(BlockPrior::ar1(gammas, corr_coeff, part_));
    double nll = 0.0;
    post_.emplace(posterior(dict_, y_, lambda, *prior_, part_, &nll));
    nll_ = nll;
  }

  double nll() const { return nll_; }
  const GaussianPosterior& post() const { return *post_; }
  const BlockPrior& prior() const { return *prior_; }

  double lambda_numerator() const {
    VectorXd resid = y_ - dict_.phi() * post_->mean();
    double tr = 0.0;
    for (int i = 0; i < part_.num_blocks(); ++i)
      tr += post_->cov_block(i)
                .cwiseProduct(grams_[static_cast<std::size_t>(i)])
                .sum();
    return resid.squaredNorm() + tr;
  }

 private:
  const Dictionary& dict_;
  const VectorXd& y_;
  BlockPartition part_;
  std::vector<MatrixXd> grams_;
  std::optional<std::vector<MatrixXd>> fixed_blocks_;
  std::optional<BlockPrior> prior_;
  std::optional<GaussianPosterior> post_;
  double nll_ = 0.0;
};

}  // namespace

RecoveryResult bsbl_em(const Dictionary& dict, const VectorXd& y,
                       const BlockPartition& partition,
                       const BsblOptions& options) {
  options.validate();
  if (dict.n() >= dict.m())
    throw std::invalid_argument("bsbl_em: recovery requires N < M");
  GeneralEngine eng(dict, y, partition, options);
  return detail::run_em_loop(eng, options);
}

}  // namespace corrsbl
