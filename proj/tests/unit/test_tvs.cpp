#include "corrsbl/tvs.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "corrsbl/bsbl.hpp"
#include "corrsbl/datagen.hpp"
#include "corrsbl/rng.hpp"
#include "doctest.h"

using corrsbl::BlockPartition;
using corrsbl::BsblOptions;
using corrsbl::Dictionary;
using corrsbl::MatrixXd;
using corrsbl::MmvProblem;
using corrsbl::MmvResult;
using corrsbl::MmvSolver;
using corrsbl::TvProblem;
using corrsbl::TvResult;
using corrsbl::VectorXd;
using corrsbl::WindowRange;

namespace {

struct TvInstance {
  Dictionary dict;
  MatrixXd x_true;
  MatrixXd y;
};

TvInstance make_tv(int n, int m, int t, std::uint64_t seed) {
  Dictionary dict = corrsbl::gen_dictionary(n, m, corrsbl::derive_seed(seed, {0}));
  corrsbl::TvSignalSpec spec = corrsbl::random_tv_spec(
      m, t, 3, {{t / 2, 2, 1}}, 0.6, 0.9, t, corrsbl::derive_seed(seed, {1}));
  corrsbl::TvSignal sig = corrsbl::gen_tv_signal(spec, corrsbl::derive_seed(seed, {2}));
  MatrixXd y = dict.phi() * sig.x;
  return TvInstance{std::move(dict), std::move(sig.x), std::move(y)};
}

}  // namespace

TEST_CASE("window partition covers the horizon in order") {
  auto p = corrsbl::window_partition(50, 5);
  REQUIRE(p.size() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(p[static_cast<std::size_t>(i)].start == 5 * i);
    CHECK(p[static_cast<std::size_t>(i)].len == 5);
  }

  CHECK(corrsbl::window_partition(50, 2).size() == 25);

  auto ragged = corrsbl::window_partition(7, 3);
  REQUIRE(ragged.size() == 3);
  CHECK(ragged[0].start == 0);
  CHECK(ragged[0].len == 3);
  CHECK(ragged[1].start == 3);
  CHECK(ragged[1].len == 3);
  CHECK(ragged[2].start == 6);
  CHECK(ragged[2].len == 1);

  // Contiguity for arbitrary (t, w).
  for (int t : {1, 2, 9, 13}) {
    for (int w = 1; w <= t; ++w) {
      auto part = corrsbl::window_partition(t, w);
      int pos = 0;
      for (const WindowRange& r : part) {
        CHECK(r.start == pos);
        CHECK(r.len >= 1);
        CHECK(r.len <= w);
        pos += r.len;
      }
      CHECK(pos == t);
    }
  }

  CHECK_THROWS_AS(corrsbl::window_partition(5, 6), std::invalid_argument);
  CHECK_THROWS_AS(corrsbl::window_partition(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(corrsbl::window_partition(5, 0), std::invalid_argument);
}

TEST_CASE("problem construction validates shapes") {
  TvInstance inst = make_tv(10, 24, 6, 2);
  CHECK_NOTHROW(TvProblem(inst.dict, inst.y, 3));
  CHECK_THROWS_AS(TvProblem(inst.dict, inst.y, 7), std::invalid_argument);
  CHECK_THROWS_AS(TvProblem(inst.dict, inst.y, 0), std::invalid_argument);
  CHECK_THROWS_AS(TvProblem(inst.dict, MatrixXd::Ones(9, 6), 3),
                  std::invalid_argument);
}

TEST_CASE("full-horizon window equals one joint solve") {
  TvInstance inst = make_tv(12, 30, 6, 5);
  BsblOptions opt;
  opt.learn_lambda = false;
  TvProblem problem(inst.dict, inst.y, 6);
  TvResult tv = corrsbl::solve_time_varying(problem, MmvSolver::kTmsbl, opt);
  MmvResult joint = corrsbl::tmsbl(MmvProblem(inst.dict, inst.y), opt);
  CHECK(tv.x_hat == joint.x_hat);
  REQUIRE(tv.windows.size() == 1);
  CHECK(tv.windows[0].start == 0);
  CHECK(tv.windows[0].len == 6);
  CHECK_FALSE(tv.windows[0].failed);
  CHECK(tv.windows[0].support == joint.support_estimate);
  CHECK(tv.windows[0].iters == joint.iters);
}

TEST_CASE("unit windows equal independent single-vector solves") {
  TvInstance inst = make_tv(12, 30, 4, 8);
  BsblOptions opt;
  opt.learn_lambda = false;
  TvProblem problem(inst.dict, inst.y, 1);
  TvResult tv = corrsbl::solve_time_varying(problem, MmvSolver::kTmsbl, opt);
  REQUIRE(tv.windows.size() == 4);
  for (int c : {0, 2}) {
    MmvResult single = corrsbl::tmsbl(
        MmvProblem(inst.dict, MatrixXd(inst.y.col(c))), opt);
    CHECK(tv.x_hat.col(c) == single.x_hat.col(0));
  }
}

TEST_CASE("windows are solved independently") {
  TvInstance inst = make_tv(12, 30, 6, 12);
  BsblOptions opt;
  opt.learn_lambda = false;
  TvProblem base(inst.dict, inst.y, 3);
  TvResult ref = corrsbl::solve_time_varying(base, MmvSolver::kTmsbl, opt);

  MatrixXd perturbed = inst.y;
  perturbed.col(4).array() += 0.5;
  TvProblem mod(inst.dict, perturbed, 3);
  TvResult out = corrsbl::solve_time_varying(mod, MmvSolver::kTmsbl, opt);

  // First window (columns 0..2) never saw the perturbation.
  CHECK(out.x_hat.leftCols(3) == ref.x_hat.leftCols(3));
  CHECK(out.windows[0].support == ref.windows[0].support);
}

TEST_CASE("a failing window is isolated and reported") {
  TvInstance inst = make_tv(10, 24, 6, 19);
  MatrixXd y = inst.y;
  y(3, 4) = std::numeric_limits<double>::quiet_NaN();
  BsblOptions opt;
  TvProblem problem(inst.dict, y, 3);
  TvResult tv = corrsbl::solve_time_varying(problem, MmvSolver::kMsbl, opt);
  REQUIRE(tv.windows.size() == 2);
  CHECK_FALSE(tv.windows[0].failed);
  CHECK(tv.windows[1].failed);
  CHECK_FALSE(tv.windows[1].error.empty());
  CHECK(tv.x_hat.rightCols(3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(tv.x_hat.leftCols(3).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("diagnostics mirror the window layout") {
  TvInstance inst = make_tv(10, 24, 7, 23);
  BsblOptions opt;
  opt.learn_lambda = false;
  TvProblem problem(inst.dict, inst.y, 3);
  TvResult tv = corrsbl::solve_time_varying(problem, MmvSolver::kMsbl, opt);
  auto ranges = corrsbl::window_partition(7, 3);
  REQUIRE(tv.windows.size() == ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    CHECK(tv.windows[i].start == ranges[i].start);
    CHECK(tv.windows[i].len == ranges[i].len);
  }
}
