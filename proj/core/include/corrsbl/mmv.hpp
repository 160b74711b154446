#pragma once

#include <vector>

#include "corrsbl/bsbl.hpp"
#include "corrsbl/linmodel.hpp"

namespace corrsbl {

// Joint-recovery problem: L measurement vectors sharing one dictionary and a
// common row support.
struct MmvProblem {
  Dictionary dict;
  MatrixXd y;  // N x L

  MmvProblem(Dictionary d, MatrixXd measurements);
  int l() const { return static_cast<int>(y.cols()); }
};

// Row-stacked single-vector form of an MmvProblem: y = vec of the rows of Y,
// dictionary Phi (kron) I_L, partition of M blocks of size L.
struct VectorizedMmv {
  Dictionary dict;
  VectorXd y;
  BlockPartition partition;
};

VectorizedMmv vectorize_mmv(const MmvProblem& problem);

// Inverse of the row-stacking map: row i of the result is x[i*L .. (i+1)*L).
MatrixXd devectorize(const VectorXd& x, int m, int l);

struct MmvResult {
  MatrixXd x_hat;  // M x L
  VectorXd row_gammas;
  double corr_coeff = 0.0;
  double lambda = 0.0;
  std::vector<int> support_estimate;  // rows whose gamma survived pruning
  std::vector<double> cost_trajectory;
  int iters = 0;
  bool converged = false;
};

// Joint recovery with the inter-vector correlation learned (learn_corr is
// forced on). L = 1 falls back to the plain single-vector solver.
MmvResult tmsbl(const MmvProblem& problem, const BsblOptions& options);

// Same solver with the correlation model disabled (B_i = I throughout).
MmvResult msbl(const MmvProblem& problem, const BsblOptions& options);

// Kronecker product of a temporal and a spatial correlation factor, for use
// as a fixed per-block correlation matrix on stacked block-of-rows problems.
MatrixXd build_kron_prior(const MatrixXd& rt, const MatrixXd& rs);

}  // namespace corrsbl
