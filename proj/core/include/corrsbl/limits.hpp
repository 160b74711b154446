#pragma once

#include <cstdint>
#include <vector>

#include "corrsbl/linmodel.hpp"

namespace corrsbl {

// Nonzero signal values on the support: K rows, one per active row, L
// columns, all entries nonzero.
struct SignalValueMatrix {
  MatrixXd w;

  explicit SignalValueMatrix(MatrixXd values);
  int k() const { return static_cast<int>(w.rows()); }
  int l() const { return static_cast<int>(w.cols()); }
};

struct LimitsReport {
  double c_value = 0.0;
  std::vector<int> argmin_subset;  // sorted row indices attaining the minimum
  double sigma_phi_sq = 0.0;
  double sigma_v_sq = 0.0;
};

// c(W) = min over nonempty T of (1/(2|T|)) ln det(I + (s_phi/s_v) W_T^T W_T),
// W_T the row submatrix. Exhaustive over all 2^K - 1 subsets (K <= 20); ties
// go to the smallest subset, then lexicographic order. Natural logarithm.
LimitsReport c_of_w(const SignalValueMatrix& w, double sigma_phi_sq,
                    double sigma_v_sq);

// N(M, eps) = ceil(ln M / (c - eps)). eps > 0 gives the sufficient
// (achievability-side) count, eps < 0 the converse side; requires |eps| < c.
int threshold_measurements(int m, const LimitsReport& report,
                           double epsilon = 0.0);

struct MlDecodeResult {
  std::vector<int> support;  // sorted, size K
  double residual = 0.0;
  long long skipped_subsets = 0;  // rank-deficient candidate supports
};

// Exhaustive least-squares support search: over all size-K supports S (in
// lexicographic order), minimizes sum_l ||Y_l - P_S Y_l||^2 with P_S the
// projector onto the span of the selected columns. First minimizer wins, so
// ties resolve lexicographically. Requires (M choose K) <= 2e6.
MlDecodeResult ml_support_decode(const MatrixXd& dict, const MatrixXd& y,
                                 int k);

struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
  double halfwidth = 0.0;
};

// 95% Wilson score interval for `successes` out of `trials`.
WilsonInterval wilson95(int successes, int trials);

struct McResult {
  int trials = 0;
  int errors = 0;
  double error_rate = 0.0;
  double ci_low = 0.0;   // Wilson 95% interval
  double ci_high = 0.0;
  long long skipped_subsets = 0;
};

// Monte-Carlo support-recovery error rate: each trial draws a uniform size-K
// support, a fresh i.i.d. Gaussian dictionary with entry variance
// sigma_phi_sq, and i.i.d. noise with variance sigma_v_sq; the signal rows on
// the support are the rows of W. Decoded with ml_support_decode; an error is
// any support mismatch. Trials use independent derived seeds, so the result
// is identical for any thread count.
McResult mc_error_rate(const SignalValueMatrix& w, int m, int n,
                       double sigma_phi_sq, double sigma_v_sq, int trials,
                       std::uint64_t seed, int threads = 1);

}  // namespace corrsbl
