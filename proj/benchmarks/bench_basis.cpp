#include "binsmooth/basis.hpp"
#include "binsmooth/rng.hpp"
#include "binsmooth/simharness.hpp"

#include <benchmark/benchmark.h>

using namespace binsmooth;

namespace {

BasisSpec make_spec(int p, int s, int J) {
    DgpSpec dgp;
    dgp.n = 4000;
    dgp.seed = 9;
    const Dataset data = generate(dgp);
    return BasisSpec(p, s, build_partition(data, sort_index(data), J));
}

void BM_eval_unconstrained(benchmark::State& state) {
    const BasisSpec spec = make_spec(static_cast<int>(state.range(0)), 0, 20);
    Rng rng(1);
    for (auto _ : state) {
        const double x = rng.uniform(spec.part.lo(), spec.part.hi());
        benchmark::DoNotOptimize(eval_unconstrained(spec, x));
    }
}
BENCHMARK(BM_eval_unconstrained)->Arg(0)->Arg(3);

void BM_eval_spline(benchmark::State& state) {
    const BasisSpec spec = make_spec(static_cast<int>(state.range(0)),
                                     static_cast<int>(state.range(0)), 20);
    Rng rng(1);
    for (auto _ : state) {
        const double x = rng.uniform(spec.part.lo(), spec.part.hi());
        benchmark::DoNotOptimize(eval_spline(spec, x));
    }
}
BENCHMARK(BM_eval_spline)->Arg(1)->Arg(3);

void BM_eval_spline_deriv(benchmark::State& state) {
    const BasisSpec spec = make_spec(3, 3, 20);
    Rng rng(1);
    for (auto _ : state) {
        const double x = rng.uniform(spec.part.lo(), spec.part.hi());
        benchmark::DoNotOptimize(eval_spline(spec, x, 2));
    }
}
BENCHMARK(BM_eval_spline_deriv);

} // namespace
