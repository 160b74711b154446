// Joint-sparse recovery for multiple measurement vectors.
//
// The MMV model Y = Phi X + V with row-sparse X is solved by vectorizing to
// the block-sparse SMV model y = (Phi (x) I_L) x with M blocks of length L,
// one per row of X.  Rows of X become blocks of x, so row support and block
// support coincide and the intra-block correlation model captures temporal
// correlation along each active row.
//
// The vectorized dictionary has Kronecker structure and every block shares
// the same correlation matrix B, which makes the posterior separable in the
// eigenbases of B and of Phi_A diag(gamma_A) Phi_A^T.  The engine below
// exploits that: per-iteration cost is dominated by an N x N and an L x L
// eigendecomposition instead of a dense NL x NL factorization.  Iterates
// match the generic block solver on the explicit Kronecker model; with L = 1
// the problem is forwarded to the generic solver directly.

#include "corrsbl/mmv.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "em_loop.hpp"

namespace corrsbl {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// EM engine for the vectorized MMV model.  Satisfies the Engine contract of
// detail::run_em_loop; all quantities are kept in matrix form (N x L, M x L)
// rather than materializing the NL x NL system.
class KronEngine {
 public:
  KronEngine(const Dictionary& dict, const MatrixXd& y)
      : dict_(dict),
        y_(y),
        part_(BlockPartition::uniform(dict.m(), static_cast<int>(y.cols()))),
        l_(static_cast<int>(y.cols())) {
    if (y_.rows() != dict_.n()) {
      throw std::invalid_argument("measurement rows must match dictionary rows");
    }
    if (!y_.allFinite()) {
      throw std::invalid_argument("measurements must be finite");
    }
    col_norm_sq_ = dict_.phi().colwise().squaredNorm();
    xhat_ = MatrixXd::Zero(dict_.m(), l_);
  }

  const BlockPartition& partition() const { return part_; }

  double mean_sq_y() const { return y_.squaredNorm() / static_cast<double>(y_.size()); }

  bool zero_y() const { return y_.isZero(0.0); }

  double denom_columns() const { return static_cast<double>(dict_.m()) * l_; }
  double denom_rows() const { return static_cast<double>(dict_.n()) * l_; }

  // Recomputes the posterior for the given hyperparameters.  The joint
  // covariance lambda I + G (x) B with G = Phi_A diag(gamma_A) Phi_A^T is
  // diagonalized as (U_G (x) U_B) diag(lambda + g_n b_l) (U_G (x) U_B)^T.
  void refresh(const VectorXd& gammas, double corr, double lambda) {
    prior_.emplace(BlockPrior::ar1(gammas, corr, part_));

    const int m = dict_.m();
    std::vector<int> active;
    active.reserve(m);
    for (int i = 0; i < m; ++i) {
      if (gammas[i] > 0.0) active.push_back(i);
    }

    VectorXd mu = VectorXd::Zero(part_.total());
    std::vector<MatrixXd> blocks(m, MatrixXd::Zero(l_, l_));
    xhat_.setZero();

    if (active.empty()) {
      if (lambda <= 0.0) {
        throw IllConditionedError("posterior undefined: zero prior and zero noise");
      }
      nll_ = static_cast<double>(y_.size()) * std::log(lambda) + y_.squaredNorm() / lambda;
      post_.emplace(part_, std::move(mu), std::move(blocks));
      return;
    }

    const MatrixXd b = ar1_correlation(l_, corr);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eb(b);
    if (eb.info() != Eigen::Success) {
      throw IllConditionedError("correlation eigendecomposition failed");
    }
    const VectorXd bev = eb.eigenvalues().cwiseMax(0.0);
    const MatrixXd& ub = eb.eigenvectors();

    const int na = static_cast<int>(active.size());
    MatrixXd phi_a(dict_.n(), na);
    VectorXd ga(na);
    for (int idx = 0; idx < na; ++idx) {
      phi_a.col(idx) = dict_.phi().col(active[idx]);
      ga[idx] = gammas[active[idx]];
    }

    MatrixXd gmat = MatrixXd::Zero(dict_.n(), dict_.n());
    {
      const MatrixXd scaled = phi_a * ga.cwiseSqrt().asDiagonal();
      gmat.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> eg(gmat);
    if (eg.info() != Eigen::Success) {
      throw IllConditionedError("posterior eigendecomposition failed");
    }
    const VectorXd gev = eg.eigenvalues().cwiseMax(0.0);
    const MatrixXd& ug = eg.eigenvectors();

    MatrixXd dmat(dict_.n(), l_);
    for (int r = 0; r < dict_.n(); ++r) {
      for (int c = 0; c < l_; ++c) {
        dmat(r, c) = lambda + gev[r] * bev[c];
      }
    }
    if (dmat.minCoeff() <= 0.0) {
      throw IllConditionedError("posterior covariance is singular");
    }

    const MatrixXd ytil = ug.transpose() * y_ * ub;
    const MatrixXd z = ug * ytil.cwiseQuotient(dmat) * ub.transpose();
    const MatrixXd zb = z * b;
    const MatrixXd pz = phi_a.transpose() * zb;
    for (int idx = 0; idx < na; ++idx) {
      xhat_.row(active[idx]) = ga[idx] * pz.row(idx);
    }
    for (int idx = 0; idx < na; ++idx) {
      mu.segment(part_.offset(active[idx]), l_) = xhat_.row(active[idx]).transpose();
    }

    // Posterior block covariance for row i: gamma_i B - gamma_i^2 U_B diag(c_i) U_B^T
    // with c_i(l) = sum_n T(n,i)^2 b_l^2 / D(n,l), T = U_G^T Phi_A.
    const MatrixXd tmat = ug.transpose() * phi_a;
    const MatrixXd tsq = tmat.cwiseAbs2();
    MatrixXd cmat = tsq.transpose() * dmat.cwiseInverse();
    cmat = (cmat.array().rowwise() * bev.transpose().array().square()).matrix();
    for (int idx = 0; idx < na; ++idx) {
      const double gi = ga[idx];
      const VectorXd ci = cmat.row(idx).transpose();
      MatrixXd cov = gi * b - gi * gi * (ub * ci.asDiagonal() * ub.transpose());
      blocks[active[idx]] = 0.5 * (cov + cov.transpose());
    }

    nll_ = dmat.array().log().sum() + ytil.cwiseAbs2().cwiseQuotient(dmat).sum();
    post_.emplace(part_, std::move(mu), std::move(blocks));
  }

  const GaussianPosterior& post() const { return *post_; }
  const BlockPrior& prior() const { return *prior_; }
  double nll() const { return nll_; }

  double lambda_numerator() const {
    const MatrixXd resid = y_ - dict_.phi() * xhat_;
    double tr = 0.0;
    for (int i = 0; i < dict_.m(); ++i) {
      tr += col_norm_sq_[i] * post_->cov_block(i).trace();
    }
    return resid.squaredNorm() + tr;
  }

 private:
  const Dictionary& dict_;
  const MatrixXd& y_;
  BlockPartition part_;
  int l_ = 0;
  VectorXd col_norm_sq_;
  MatrixXd xhat_;
  std::optional<BlockPrior> prior_;
  std::optional<GaussianPosterior> post_;
  double nll_ = 0.0;
};

MmvResult to_mmv_result(const RecoveryResult& r, int m, int l) {
  MmvResult out;
  out.x_hat = devectorize(r.x_hat, m, l);
  out.row_gammas = r.gammas;
  out.corr_coeff = r.corr_coeff;
  out.lambda = r.lambda;
  for (int i = 0; i < m; ++i) {
    if (r.gammas[i] > 0.0) out.support_estimate.push_back(i);
  }
  out.cost_trajectory = r.cost_trajectory;
  out.iters = r.iters;
  out.converged = r.converged;
  return out;
}

MmvResult solve_mmv(const MmvProblem& problem, const BsblOptions& options) {
  options.validate();
  if (options.fixed_corr.has_value()) {
    throw std::invalid_argument("fixed correlation blocks are not supported by the joint solvers");
  }
  const Dictionary& dict = problem.dict;
  if (dict.n() >= dict.m()) {
    throw std::invalid_argument("recovery requires N < M");
  }
  const int l = problem.l();
  if (l == 1) {
    RecoveryResult r = bsbl_em(dict, problem.y.col(0), BlockPartition::uniform(dict.m(), 1), options);
    return to_mmv_result(r, dict.m(), 1);
  }
  KronEngine engine(dict, problem.y);
  RecoveryResult r = detail::run_em_loop(engine, options);
  return to_mmv_result(r, dict.m(), l);
}

}  // namespace

MmvProblem::MmvProblem(Dictionary dict_in, MatrixXd y_in) : dict(std::move(dict_in)), y(std::move(y_in)) {
  if (y.rows() != dict.n()) {
    throw std::invalid_argument("measurement rows must match dictionary rows");
  }
  if (y.cols() < 1) {
    throw std::invalid_argument("at least one measurement vector is required");
  }
}

VectorizedMmv vectorize_mmv(const MmvProblem& problem) {
  const int n = problem.dict.n();
  const int m = problem.dict.m();
  const int l = problem.l();
  MatrixXd d = MatrixXd::Zero(n * l, m * l);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double v = problem.dict.phi()(i, j);
      for (int a = 0; a < l; ++a) {
        d(i * l + a, j * l + a) = v;
      }
    }
  }
  VectorXd y(n * l);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < l; ++a) {
      y[i * l + a] = problem.y(i, a);
    }
  }
  return VectorizedMmv{Dictionary(std::move(d)), std::move(y), BlockPartition::uniform(m, l)};
}

MatrixXd devectorize(const VectorXd& x, int m, int l) {
  if (m < 1 || l < 1 || x.size() != static_cast<Eigen::Index>(m) * l) {
    throw std::invalid_argument("vectorized length must equal rows * columns");
  }
  MatrixXd out(m, l);
  for (int i = 0; i < m; ++i) {
    out.row(i) = x.segment(i * l, l).transpose();
  }
  return out;
}

MmvResult tmsbl(const MmvProblem& problem, const BsblOptions& options) {
  BsblOptions opt = options;
  opt.learn_corr = true;
  return solve_mmv(problem, opt);
}

MmvResult msbl(const MmvProblem& problem, const BsblOptions& options) {
  BsblOptions opt = options;
  opt.learn_corr = false;
  return solve_mmv(problem, opt);
}

MatrixXd build_kron_prior(const MatrixXd& rt, const MatrixXd& rs) {
  auto check = [](const MatrixXd& a, const char* what) {
    if (a.rows() < 1 || a.rows() != a.cols()) {
      throw std::invalid_argument(std::string(what) + " must be square and nonempty");
    }
    if (!a.isApprox(a.transpose(), 1e-12)) {
      throw std::invalid_argument(std::string(what) + " must be symmetric");
    }
    Eigen::LLT<MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument(std::string(what) + " must be positive definite");
    }
  };
  check(rt, "temporal correlation");
  check(rs, "spatial correlation");
  const int dt = static_cast<int>(rt.rows());
  const int ds = static_cast<int>(rs.rows());
  MatrixXd out(dt * ds, dt * ds);
  for (int i = 0; i < dt; ++i) {
    for (int j = 0; j < dt; ++j) {
      out.block(i * ds, j * ds, ds, ds) = rt(i, j) * rs;
    }
  }
  return out;
}

}  // namespace corrsbl
