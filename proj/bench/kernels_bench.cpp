// Serial reference path against the OpenMP kernels on the same workloads.
#include <benchmark/benchmark.h>

#include "heavycomb/null_models.hpp"
#include "heavycomb/simulation.hpp"

namespace hc = heavycomb;

namespace {

hc::Exec exec_for(const benchmark::State& state) { return {state.range(0) != 0, 0}; }

void BM_NullScores(benchmark::State& state) {
  const std::vector<hc::TransformSpec> methods{hc::TransformSpec::fisher(), hc::TransformSpec::harmonic_mean(),
                                               hc::TransformSpec::trunc_cauchy()};
  for (auto _ : state) {
    auto s = hc::simulate_scores(methods, hc::CorrelationModel::exchangeable(0.5), hc::SignalSpec::null(100), 50'000,
                                 1, hc::Stream::NullStats, exec_for(state));
    benchmark::DoNotOptimize(s.data());
  }
}
BENCHMARK(BM_NullScores)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RatioCurve(benchmark::State& state) {
  for (auto _ : state) {
    auto r = hc::ratio_curve(hc::TransformSpec::harmonic_mean(), hc::CorrelationModel::exchangeable(0.3), 3,
                             {1e-2, 1e-3}, 500'000, 1, exec_for(state));
    benchmark::DoNotOptimize(r.data());
  }
}
BENCHMARK(BM_RatioCurve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ImportanceSampling(benchmark::State& state) {
  hc::IsSettings is;
  is.samples = 100'000;
  for (auto _ : state) {
    auto r = hc::trunc_cauchy_pvalue(2.0e4, 20, 0.01, 1e-2, is);
    benchmark::DoNotOptimize(r.combined_p);
  }
}
BENCHMARK(BM_ImportanceSampling)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
