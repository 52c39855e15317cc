#include "famarec/bootstrap.hpp"
#include "famarec/recursion.hpp"
#include "famarec/regression.hpp"
#include "famarec/synthetic.hpp"

#include <benchmark/benchmark.h>

using namespace famarec;

namespace {

ExcessReturnSeries sample(std::size_t n) {
    synthetic::GeneratorSpec spec;
    spec.kind = synthetic::KnownBeta{0.0, 1.0, 3.0};
    spec.n = n;
    return synthetic::generate(spec).series;
}

void BM_FitClassical(benchmark::State& state) {
    const auto s = sample(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fit_fama(s.rho(), s.spread(), SeMethod::classical()));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitClassical)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_FitNeweyWest(benchmark::State& state) {
    const auto s = sample(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fit_fama(s.rho(), s.spread(), SeMethod::newey_west()));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitNeweyWest)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_Bootstrap(benchmark::State& state) {
    const auto s = sample(364);
    BootstrapConfig cfg;
    cfg.replications = 999;
    cfg.scheme = static_cast<BootstrapScheme>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_bootstrap(s.rho(), s.spread(), cfg));
    state.SetLabel(to_string(cfg.scheme));
}
BENCHMARK(BM_Bootstrap)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_RecursionAnalytic(benchmark::State& state) {
    const auto s = sample(364);
    RecursionSpec spec;
    spec.mode = static_cast<RecursionMode>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_recursion(s, spec));
    state.SetLabel(to_string(spec.mode));
}
BENCHMARK(BM_RecursionAnalytic)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

void BM_RecursionBootstrap(benchmark::State& state) {
    const auto s = sample(364);
    RecursionSpec spec;
    spec.mode = RecursionMode::rolling;
    spec.ci = CiMethod::bootstrap_percentile;
    spec.bootstrap.replications = 499;
    for (auto _ : state) benchmark::DoNotOptimize(run_recursion(s, spec));
}
BENCHMARK(BM_RecursionBootstrap)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
