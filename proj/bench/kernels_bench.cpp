// Serial reference kernels against their OpenMP versions. Thread count
// follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "pricebounds/bounds_bootstrap.hpp"
#include "pricebounds/bounds_cv.hpp"
#include "pricebounds/price_optimizer.hpp"
#include "pricebounds/reference.hpp"
#include "pricebounds/synthetic_data.hpp"

namespace {

using namespace pricebounds;

SyntheticTrial make_trial(int m, int n) {
  SyntheticSpec spec;
  spec.m = m;
  spec.n = n;
  spec.delta = 0.5;
  spec.seed = 42;
  return generate_dataset(spec);
}

template <bool Parallel>
void BM_Bootstrap(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const SyntheticTrial trial = make_trial(m, 1000);
  const PriceEnvelope env = PriceEnvelope::uniform(m, 0.5, 1.1);
  const QpSolverConfig qp;
  for (auto _ : state) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(bootstrap_replicates(trial.data, env, 100, qp, 7));
    else
      benchmark::DoNotOptimize(reference::bootstrap_replicates(trial.data, env, 100, qp, 7));
  }
}

template <bool Parallel>
void BM_CvFolds(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const SyntheticTrial trial = make_trial(m, 1000);
  const CvRevenueEstimator estimator(trial.data, CvConfig{}, 7);
  const PriceVector lo = PriceVector::Constant(m, 0.6);
  const PriceVector hi = PriceVector::Constant(m, 1.0);
  for (auto _ : state) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(estimator.fold_revenues(lo, hi));
    else
      benchmark::DoNotOptimize(reference::cv_fold_revenues(estimator, lo, hi));
  }
}

template <bool Parallel>
void BM_GridOracle(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const SyntheticTrial trial = make_trial(m, 10);
  const PriceVector lo = PriceVector::Constant(m, 0.5);
  const PriceVector hi = PriceVector::Constant(m, 1.1);
  const double resolution = m == 3 ? 0.005 : 0.001;
  for (auto _ : state) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(grid_oracle(trial.theta_star, lo, hi, resolution));
    else
      benchmark::DoNotOptimize(reference::grid_oracle(trial.theta_star, lo, hi, resolution));
  }
}

}  // namespace

BENCHMARK(BM_Bootstrap<false>)->Name("bootstrap/serial")->Arg(2)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bootstrap<true>)->Name("bootstrap/openmp")->Arg(2)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CvFolds<false>)->Name("cv_folds/serial")->Arg(2)->Arg(10)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CvFolds<true>)->Name("cv_folds/openmp")->Arg(2)->Arg(10)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GridOracle<false>)->Name("grid_oracle/serial")->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridOracle<true>)->Name("grid_oracle/openmp")->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
