#include <benchmark/benchmark.h>

#include "bflab/bayes_core.hpp"
#include "bflab/presets.hpp"
#include "bflab/runner.hpp"
#include "bflab/sequential.hpp"

using namespace bflab;

static void BM_JzsTTest(benchmark::State& state) {
    const TTestStat stat{static_cast<std::uint64_t>(state.range(0)), 2.5, 0.0, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(log_bf_ttest_jzs(stat));
}
BENCHMARK(BM_JzsTTest)->Arg(10)->Arg(100)->Arg(5000);

static void BM_RegressionGPrior(benchmark::State& state) {
    RegressionStat stat;
    stat.r_squared = 0.3;
    stat.n = static_cast<std::uint64_t>(state.range(0));
    stat.p = 1;
    for (auto _ : state) benchmark::DoNotOptimize(log_bf_regression_gprior(stat));
}
BENCHMARK(BM_RegressionGPrior)->Arg(20)->Arg(200);

static void BM_ContingencyGunelDickey(benchmark::State& state) {
    const ContingencyTable2x2 table{{55, 45, 45, 55}, ContingencyScheme::JointMultinomial, 1.0, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(log_bf_contingency_gd(table));
}
BENCHMARK(BM_ContingencyGunelDickey);

static void BM_Trial(benchmark::State& state, const char* preset) {
    const auto spec = find_preset(preset).config.trial_spec();
    Rng rng(1);
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_trial(spec, Hypothesis::H1, rng, i++));
}
BENCHMARK_CAPTURE(BM_Trial, fig1, "fig1");
BENCHMARK_CAPTURE(BM_Trial, fig4b, "fig4b");
BENCHMARK_CAPTURE(BM_Trial, regression_os, "regression-os-current");

static void BM_Batch(benchmark::State& state) {
    const auto spec = find_preset("fig1-optional-stopping").config.trial_spec();
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_batch(spec, Hypothesis::H1, 1000, 1, static_cast<unsigned>(state.range(0))));
    }
}
BENCHMARK(BM_Batch)->Arg(1)->Arg(2)->UseRealTime();
BENCHMARK_MAIN();
