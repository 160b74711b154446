#include <benchmark/benchmark.h>

#include <random>

#include "corrsbl/bsbl.hpp"
#include "corrsbl/datagen.hpp"
#include "corrsbl/limits.hpp"
#include "corrsbl/mmv.hpp"
#include "corrsbl/rng.hpp"

namespace {

using corrsbl::BlockPartition;
using corrsbl::BsblOptions;
using corrsbl::Dictionary;
using corrsbl::MatrixXd;
using corrsbl::VectorXd;

void BM_Posterior(benchmark::State& state) {
  Dictionary dict = corrsbl::gen_dictionary(100, 300, 1);
  BlockPartition part = BlockPartition::uniform(75, 4);
  VectorXd gammas = VectorXd::Zero(75);
  for (int i = 0; i < 75; i += 4) gammas[i] = 1.0;  // sparse active set
  corrsbl::BlockPrior prior = corrsbl::BlockPrior::ar1(gammas, 0.9, part);
  corrsbl::BlockSignal sig = corrsbl::gen_block_signal(part, 20, 0.9, 1.0, 2);
  VectorXd y = dict.phi() * sig.x;
  for (auto _ : state) {
    double nll = 0.0;
    auto post = corrsbl::posterior(dict, y, 1e-3, prior, part, &nll);
    benchmark::DoNotOptimize(post.mean().sum() + nll);
  }
}
BENCHMARK(BM_Posterior);

void BM_BlockSolve(benchmark::State& state) {
  Dictionary dict = corrsbl::gen_dictionary(40, 96, 3);
  BlockPartition part = BlockPartition::uniform(24, 4);
  corrsbl::BlockSignal sig = corrsbl::gen_block_signal(part, 6, 0.9, 1.0, 4);
  VectorXd y = dict.phi() * sig.x;
  BsblOptions opt;
  opt.learn_lambda = false;
  for (auto _ : state) {
    auto res = corrsbl::bsbl_em(dict, y, part, opt);
    benchmark::DoNotOptimize(res.x_hat.sum());
  }
}
BENCHMARK(BM_BlockSolve);

void BM_JointSolve(benchmark::State& state) {
  Dictionary dict = corrsbl::gen_dictionary(25, 125, 5);
  corrsbl::MmvSignal sig = corrsbl::gen_mmv_signal(125, 4, 18, 0.9, 6);
  MatrixXd y = dict.phi() * sig.x;
  corrsbl::MmvProblem problem(dict, y);
  BsblOptions opt;
  opt.learn_lambda = false;
  for (auto _ : state) {
    auto res = corrsbl::tmsbl(problem, opt);
    benchmark::DoNotOptimize(res.x_hat.sum());
  }
}
BENCHMARK(BM_JointSolve);

void BM_RateFunction(benchmark::State& state) {
  MatrixXd w(12, 2);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 2; ++j) {
      double v = 0.0;
      while (v == 0.0) v = normal(rng);
      w(i, j) = v;
    }
  corrsbl::SignalValueMatrix values(w);
  for (auto _ : state) {
    auto rep = corrsbl::c_of_w(values, 1.0, 0.1);
    benchmark::DoNotOptimize(rep.c_value);
  }
}
BENCHMARK(BM_RateFunction);

void BM_SupportDecode(benchmark::State& state) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd dict(8, 32);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 32; ++j) dict(i, j) = normal(rng);
  MatrixXd y = dict.col(5) + 2.0 * dict.col(17);
  for (auto _ : state) {
    auto res = corrsbl::ml_support_decode(dict, y, 2);
    benchmark::DoNotOptimize(res.residual);
  }
}
BENCHMARK(BM_SupportDecode);

}  // namespace

BENCHMARK_MAIN();
