#include "binsmooth/inference.hpp"
#include "binsmooth/simharness.hpp"

#include <benchmark/benchmark.h>

using namespace binsmooth;

namespace {

void BM_simulate_sup(benchmark::State& state) {
    DgpSpec dgp;
    dgp.n = 1000;
    dgp.seed = 7;
    const Dataset data = generate(dgp);
    const RbcModel rbc = prepare_rbc(data, 0, 0, 0, 1, 15, VceMode::hc0);
    const EvalGrid grid = make_grid(rbc, 0);
    const int draws = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_sup(rbc, grid, draws, 42, SupMode::abs));
    }
    state.SetItemsProcessed(state.iterations() * draws);
}
BENCHMARK(BM_simulate_sup)->Arg(200)->Arg(1000);

void BM_confidence_band(benchmark::State& state) {
    DgpSpec dgp;
    dgp.n = 1000;
    dgp.seed = 7;
    const Dataset data = generate(dgp);
    for (auto _ : state) {
        benchmark::DoNotOptimize(confidence_band(data, 0, 0, 0, 3, 0.05, 15, 500, 42));
    }
}
BENCHMARK(BM_confidence_band);

} // namespace
