#pragma once

// Internal: the EM iteration shared by the single-vector and joint solvers.
// An Engine owns the problem data and knows how to evaluate the posterior and
// cost for a given hyperparameter state; the loop owns pruning, the update
// schedule, and convergence. Engine requirements:
//   const BlockPartition& partition();
//   double mean_sq_y();  bool zero_y();
//   void refresh(gammas, corr_coeff, lambda);  // posterior + cost
//   double nll();  const GaussianPosterior& post();  const BlockPrior& prior();
//   double lambda_numerator();                 // update-rule numerator
//   double denom_columns();  double denom_rows();

#include <utility>
#include <vector>

#include "corrsbl/bsbl.hpp"

namespace corrsbl::detail {

struct LambdaState {
  double value = 0.0;
  bool learn = false;
};

inline LambdaState resolve_lambda(const BsblOptions& opt, double mean_sq_y) {
  if (opt.lambda_fixed) return {*opt.lambda_fixed, false};
  if (opt.learn_lambda)
    return {opt.lambda_init ? *opt.lambda_init : 1e-3 * mean_sq_y, true};
  return {opt.lambda_init ? *opt.lambda_init : 1e-10 * mean_sq_y, false};
}

template <class Engine>
RecoveryResult run_em_loop(Engine& eng, const BsblOptions& opt) {
  const BlockPartition& part = eng.partition();
  const int g = part.num_blocks();
  LambdaState lam = resolve_lambda(opt, eng.mean_sq_y());
  double lambda = lam.value;
  VectorXd gamma = VectorXd::Ones(g);
  double rbar = 0.0;
  RecoveryResult res;

  if (eng.zero_y()) {
    // Zero data makes gamma = 0 the exact cost minimizer; one evaluation at
    // the starting hyperparameters keeps the trajectory honest.
    eng.refresh(gamma, rbar, lambda);
    res.cost_trajectory.push_back(eng.nll());
    res.x_hat = VectorXd::Zero(part.total());
    res.gammas = VectorXd::Zero(g);
    res.corr_coeff = rbar;
    res.lambda = lambda;
    res.iters = 1;
    res.converged = true;
    return res;
  }

  std::vector<char> alive(static_cast<std::size_t>(g), 1);
  bool converged = false;
  int iters = 0;
  for (int it = 0; it < opt.max_iters; ++it) {
    eng.refresh(gamma, rbar, lambda);
    res.cost_trajectory.push_back(eng.nll());
    ++iters;

    VectorXd gnew = update_gamma(eng.post(), eng.prior(), part);
    for (int i = 0; i < g; ++i)
      if (!alive[static_cast<std::size_t>(i)]) gnew[i] = 0.0;
    double gmax = gnew.maxCoeff();
    if (opt.prune_gamma > 0.0 && gmax > 0.0) {
      for (int i = 0; i < g; ++i) {
        if (alive[static_cast<std::size_t>(i)] &&
            gnew[i] < opt.prune_gamma * gmax) {
          gnew[i] = 0.0;
          alive[static_cast<std::size_t>(i)] = 0;
        }
      }
    }

    if (lam.learn) {
      double den = opt.lambda_denominator == LambdaDenominator::kColumns
                       ? eng.denom_columns()
                       : eng.denom_rows();
      lambda = eng.lambda_numerator() / den;
    }
    if (opt.learn_corr) rbar = update_corr(eng.post(), gnew, part, rbar);

    double delta = (gnew - gamma).cwiseAbs().maxCoeff();
    double scale = gnew.maxCoeff();
    gamma = std::move(gnew);
    if (scale <= 0.0 || delta <= opt.tol * scale) {
      converged = true;
      break;
    }
  }

  eng.refresh(gamma, rbar, lambda);
  res.x_hat = eng.post().mean();
  res.gammas = std::move(gamma);
  res.corr_coeff = rbar;
  res.lambda = lambda;
  res.iters = iters;
  res.converged = converged;
  return res;
}

}  // namespace corrsbl::detail
