#include "corrsbl/tvs.hpp"

#include <algorithm>
#include <exception>
#include <stdexcept>
#include <utility>

namespace corrsbl {

TvProblem::TvProblem(Dictionary d, MatrixXd measurements, int w)
    : dict(std::move(d)), y(std::move(measurements)), window(w) {
  if (y.rows() != dict.n()) {
    throw std::invalid_argument("measurement rows must match dictionary rows");
  }
  if (y.cols() < 1) {
    throw std::invalid_argument("at least one time step is required");
  }
  if (window < 1 || window > y.cols()) {
    throw std::invalid_argument("window length must lie in [1, T]");
  }
}

std::vector<WindowRange> window_partition(int t, int w) {
  if (t < 1) {
    throw std::invalid_argument("time-step count must be positive");
  }
  if (w < 1 || w > t) {
    throw std::invalid_argument("window length must lie in [1, T]");
  }
  std::vector<WindowRange> out;
  for (int s = 0; s < t; s += w) {
    out.push_back(WindowRange{s, std::min(w, t - s)});
  }
  return out;
}

TvResult solve_time_varying(const TvProblem& problem, MmvSolver solver,
                            const BsblOptions& options) {
  TvResult result;
  result.x_hat = MatrixXd::Zero(problem.dict.m(), problem.t());
  for (const WindowRange& range : window_partition(problem.t(), problem.window)) {
    WindowDiag diag;
    diag.start = range.start;
    diag.len = range.len;
    try {
      MmvProblem sub(problem.dict, problem.y.middleCols(range.start, range.len));
      MmvResult r = solver == MmvSolver::kTmsbl ? tmsbl(sub, options)
                                                : msbl(sub, options);
      result.x_hat.middleCols(range.start, range.len) = r.x_hat;
      diag.support = std::move(r.support_estimate);
      diag.corr_coeff = r.corr_coeff;
      diag.iters = r.iters;
      diag.converged = r.converged;
    } catch (const std::exception& e) {
      diag.failed = true;
      diag.error = e.what();
    }
    result.windows.push_back(std::move(diag));
  }
  return result;
}

}  // namespace corrsbl
