#include "corrsbl/linmodel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "doctest.h"

using corrsbl::BlockPartition;
using corrsbl::BlockPrior;
using corrsbl::Dictionary;
using corrsbl::GaussianPosterior;
using corrsbl::MatrixXd;
using corrsbl::VectorXd;

namespace {

MatrixXd random_dict_matrix(int n, int m, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd phi(n, m);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c) phi(r, c) = normal(rng);
  return phi;
}

// Independent dense model: Sigma0 assembled entry by entry, Sigma_y inverted
// directly. Used as the oracle for the dual-form posterior.
struct DenseModel {
  MatrixXd sigma0;
  MatrixXd sigma_y;
  VectorXd mu;
  MatrixXd cov;

  DenseModel(const MatrixXd& phi, const VectorXd& y, double lambda,
             const VectorXd& gammas, double corr,
             const std::vector<int>& sizes) {
    const int total = phi.cols();
    sigma0 = MatrixXd::Zero(total, total);
    int off = 0;
    for (std::size_t b = 0; b < sizes.size(); ++b) {
      const int d = sizes[b];
      for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c)
          sigma0(off + a, off + c) =
              gammas[static_cast<int>(b)] * std::pow(corr, std::abs(a - c));
      off += d;
    }
    sigma_y = lambda * MatrixXd::Identity(phi.rows(), phi.rows()) +
              phi * sigma0 * phi.transpose();
    const MatrixXd sinv = sigma_y.inverse();
    mu = sigma0 * phi.transpose() * sinv * y;
    cov = sigma0 - sigma0 * phi.transpose() * sinv * phi * sigma0;
  }
};

}  // namespace

TEST_CASE("block partition exposes sizes, offsets and totals") {
  BlockPartition part(std::vector<int>{2, 3, 1});
  CHECK(part.num_blocks() == 3);
  CHECK(part.total() == 6);
  CHECK(part.size(0) == 2);
  CHECK(part.size(1) == 3);
  CHECK(part.size(2) == 1);
  CHECK(part.offset(0) == 0);
  CHECK(part.offset(1) == 2);
  CHECK(part.offset(2) == 5);
  CHECK(part.sizes() == std::vector<int>{2, 3, 1});
  CHECK(part == BlockPartition(std::vector<int>{2, 3, 1}));
  CHECK_FALSE(part == BlockPartition(std::vector<int>{3, 2, 1}));
}

TEST_CASE("uniform partition repeats one block size") {
  BlockPartition part = BlockPartition::uniform(3, 2);
  CHECK(part == BlockPartition(std::vector<int>{2, 2, 2}));
  CHECK(part.total() == 6);
}

TEST_CASE("degenerate partitions are rejected") {
  CHECK_THROWS_AS(BlockPartition(std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(BlockPartition(std::vector<int>{2, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(BlockPartition::uniform(0, 2), std::invalid_argument);
}

TEST_CASE("dictionary validates shape and columns") {
  CHECK_NOTHROW(Dictionary(random_dict_matrix(2, 3, 1)));
  CHECK_NOTHROW(Dictionary(random_dict_matrix(3, 3, 2)));  // square allowed
  CHECK_THROWS_AS(Dictionary(random_dict_matrix(3, 2, 3)),
                  std::invalid_argument);
  MatrixXd with_zero = random_dict_matrix(2, 4, 4);
  with_zero.col(1).setZero();
  CHECK_THROWS_AS((Dictionary(with_zero)), std::invalid_argument);
  Dictionary dict(random_dict_matrix(2, 5, 5));
  CHECK(dict.n() == 2);
  CHECK(dict.m() == 5);
}

TEST_CASE("first-order correlation matrix has power-law entries") {
  MatrixXd b = corrsbl::ar1_correlation(3, 0.5);
  CHECK(b(0, 0) == 1.0);
  CHECK(b(0, 1) == doctest::Approx(0.5));
  CHECK(b(0, 2) == doctest::Approx(0.25));
  CHECK(b(1, 2) == doctest::Approx(0.5));
  CHECK(b == b.transpose());
  CHECK(corrsbl::ar1_correlation(4, 0.0) == MatrixXd::Identity(4, 4));
}

TEST_CASE("prior construction validates gammas and correlation") {
  BlockPartition part(std::vector<int>{2, 2});
  VectorXd gammas(2);
  gammas << 1.0, 2.0;
  CHECK_THROWS_AS(BlockPrior::ar1(VectorXd::Ones(3), 0.0, part),
                  std::invalid_argument);
  VectorXd neg(2);
  neg << 1.0, -0.5;
  CHECK_THROWS_AS(BlockPrior::ar1(neg, 0.0, part), std::invalid_argument);
  CHECK_THROWS_AS(BlockPrior::ar1(gammas, 0.995, part), std::invalid_argument);
  BlockPrior prior = BlockPrior::ar1(gammas, 0.8, part);
  CHECK(prior.corr_coeff() == 0.8);
  CHECK(prior.gamma(1) == 2.0);
  CHECK(prior.corr_block(0) == corrsbl::ar1_correlation(2, 0.8));
  CHECK(prior.total_dim() == 4);
}

TEST_CASE("explicit correlation blocks must be symmetric positive definite") {
  VectorXd gammas = VectorXd::Ones(1);
  MatrixXd rect(2, 3);
  rect.setOnes();
  CHECK_THROWS_AS(BlockPrior::with_blocks(gammas, {rect}),
                  std::invalid_argument);
  MatrixXd asym(2, 2);
  asym << 1.0, 0.2, 0.3, 1.0;
  CHECK_THROWS_AS(BlockPrior::with_blocks(gammas, {asym}),
                  std::invalid_argument);
  MatrixXd indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(BlockPrior::with_blocks(gammas, {indef}),
                  std::invalid_argument);
  MatrixXd good(2, 2);
  good << 1.0, 0.4, 0.4, 1.0;
  CHECK_NOTHROW(BlockPrior::with_blocks(gammas, {good}));
}

TEST_CASE("prior covariance assembles gamma-scaled blocks on the diagonal") {
  BlockPartition part(std::vector<int>{2, 1});
  VectorXd gammas(2);
  gammas << 2.0, 3.0;
  BlockPrior prior = BlockPrior::ar1(gammas, 0.5, part);
  MatrixXd sigma0 = corrsbl::build_sigma0(prior, part);
  MatrixXd expected(3, 3);
  expected << 2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 3.0;
  CHECK((sigma0 - expected).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(sigma0(0, 2) == 0.0);  // cross-block entries are exactly zero
}

TEST_CASE("posterior matches the directly inverted dense model") {
  const std::vector<int> sizes{2, 2, 2};
  const MatrixXd phi = random_dict_matrix(4, 6, 11);
  Dictionary dict(phi);
  BlockPartition part(sizes);
  VectorXd gammas(3);
  gammas << 0.7, 1.3, 0.4;
  const double corr = 0.6;
  const double lambda = 0.1;
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd y(4);
  for (int i = 0; i < 4; ++i) y[i] = normal(rng);

  BlockPrior prior = BlockPrior::ar1(gammas, corr, part);
  double nll = 0.0;
  GaussianPosterior post = corrsbl::posterior(dict, y, lambda, prior, part, &nll);
  DenseModel oracle(phi, y, lambda, gammas, corr, sizes);

  CHECK((post.mean() - oracle.mu).cwiseAbs().maxCoeff() < 1e-10);
  for (int b = 0; b < 3; ++b) {
    MatrixXd expected = oracle.cov.block(part.offset(b), part.offset(b), 2, 2);
    CHECK((post.cov_block(b) - expected).cwiseAbs().maxCoeff() < 1e-10);
  }

  const double expected_nll =
      std::log(oracle.sigma_y.determinant()) +
      y.dot(oracle.sigma_y.inverse() * y);
  CHECK(nll == doctest::Approx(expected_nll).epsilon(1e-9));
  CHECK(corrsbl::neg_log_likelihood(dict, y, lambda, prior, part) ==
        doctest::Approx(nll));

  MatrixXd dense_cov = corrsbl::posterior_dense_cov(dict, lambda, prior, part);
  CHECK((dense_cov - oracle.cov).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("zero-variance blocks produce exactly zero posterior entries") {
  const MatrixXd phi = random_dict_matrix(3, 6, 21);
  Dictionary dict(phi);
  BlockPartition part(std::vector<int>{2, 2, 2});
  VectorXd gammas(3);
  gammas << 1.0, 0.0, 0.5;
  BlockPrior prior = BlockPrior::ar1(gammas, 0.3, part);
  VectorXd y(3);
  y << 1.0, -2.0, 0.5;
  GaussianPosterior post = corrsbl::posterior(dict, y, 0.05, prior, part);
  CHECK(post.mean_block(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(post.cov_block(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(post.mean_block(0).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("all-zero prior reduces the marginal to scaled identity noise") {
  const MatrixXd phi = random_dict_matrix(3, 5, 22);
  Dictionary dict(phi);
  BlockPartition part(std::vector<int>{2, 3});
  BlockPrior prior = BlockPrior::ar1(VectorXd::Zero(2), 0.0, part);
  VectorXd y(3);
  y << 1.0, 2.0, -1.0;
  const double lambda = 0.25;
  double nll = 0.0;
  GaussianPosterior post = corrsbl::posterior(dict, y, lambda, prior, part, &nll);
  CHECK(post.mean().cwiseAbs().maxCoeff() == 0.0);
  CHECK(nll == doctest::Approx(3.0 * std::log(lambda) +
                               y.squaredNorm() / lambda));
  CHECK_THROWS_AS(corrsbl::posterior(dict, y, 0.0, prior, part, &nll),
                  corrsbl::IllConditionedError);
}

TEST_CASE("noise-free posterior interpolates the measurements") {
  const MatrixXd phi = random_dict_matrix(2, 4, 31);
  Dictionary dict(phi);
  BlockPartition part(std::vector<int>{2, 2});
  BlockPrior prior = BlockPrior::ar1(VectorXd::Ones(2), 0.0, part);
  VectorXd y(2);
  y << 0.3, -1.2;
  GaussianPosterior post = corrsbl::posterior(dict, y, 0.0, prior, part);
  CHECK((y - phi * post.mean()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("posterior rejects inconsistent inputs") {
  const MatrixXd phi = random_dict_matrix(3, 6, 41);
  Dictionary dict(phi);
  BlockPartition part(std::vector<int>{2, 2, 2});
  BlockPrior prior = BlockPrior::ar1(VectorXd::Ones(3), 0.0, part);
  VectorXd y = VectorXd::Ones(3);
  CHECK_THROWS_AS(corrsbl::posterior(dict, VectorXd::Ones(4), 0.1, prior, part),
                  std::invalid_argument);
  CHECK_THROWS_AS(corrsbl::posterior(dict, y, -0.1, prior, part),
                  std::invalid_argument);
  BlockPartition wrong(std::vector<int>{3, 3});
  CHECK_THROWS_AS(
      corrsbl::posterior(dict, y, 0.1,
                         BlockPrior::ar1(VectorXd::Ones(2), 0.0, wrong), part),
      std::invalid_argument);
  CHECK((std::is_base_of<std::runtime_error, corrsbl::IllConditionedError>::value));
}
