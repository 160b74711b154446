#pragma once

#include <string>
#include <vector>

#include "corrsbl/mmv.hpp"

namespace corrsbl {

enum class MmvSolver { kTmsbl, kMsbl };

// Time-varying-support problem: a sequence of T measurement vectors treated
// as consecutive windows of `window` columns, each solved as one MmvProblem.
struct TvProblem {
  Dictionary dict;
  MatrixXd y;  // N x T
  int window;

  TvProblem(Dictionary d, MatrixXd measurements, int w);
  int t() const { return static_cast<int>(y.cols()); }
};

struct WindowRange {
  int start = 0;
  int len = 0;
};

// Disjoint consecutive ranges covering [0, T): each of length W except a
// possibly shorter final range.
std::vector<WindowRange> window_partition(int t, int w);

struct WindowDiag {
  int start = 0;
  int len = 0;
  bool failed = false;
  std::string error;
  std::vector<int> support;
  double corr_coeff = 0.0;
  int iters = 0;
  bool converged = false;
};

struct TvResult {
  MatrixXd x_hat;  // M x T; failed windows left as zeros
  std::vector<WindowDiag> windows;
};

// Solves each window independently; a window whose solve throws is flagged in
// its diagnostics and the remaining windows are still solved.
TvResult solve_time_varying(const TvProblem& problem, MmvSolver solver,
                            const BsblOptions& options);

}  // namespace corrsbl
