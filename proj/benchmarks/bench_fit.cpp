#include "binsmooth/banded.hpp"
#include "binsmooth/fit.hpp"
#include "binsmooth/rng.hpp"
#include "binsmooth/simharness.hpp"

#include <benchmark/benchmark.h>

using namespace binsmooth;

namespace {

void BM_fit_binscatter(benchmark::State& state) {
    DgpSpec dgp;
    dgp.n = state.range(0);
    dgp.seed = 3;
    const Dataset data = generate(dgp);
    const int J = static_cast<int>(state.range(1));
    const int p = static_cast<int>(state.range(2));
    const QuantilePartition part = build_partition(data, sort_index(data), J);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_binscatter(data, BasisSpec(p, p, part)));
    }
    state.SetItemsProcessed(state.iterations() * dgp.n);
}
BENCHMARK(BM_fit_binscatter)
    ->Args({1000, 20, 0})
    ->Args({1000, 20, 3})
    ->Args({100000, 60, 0})
    ->Args({100000, 60, 3});

void BM_banded_cholesky(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const int kd = 4;
    Rng rng(5);
    SymmetricBandMatrix a(dim, kd);
    for (int j = 0; j < dim; ++j) {
        a.add(j, j, 10.0 + rng.uniform01());
        for (int i = j + 1; i <= std::min(dim - 1, j + kd); ++i)
            a.add(i, j, rng.uniform(-1.0, 1.0));
    }
    Eigen::VectorXd b = Eigen::VectorXd::Ones(dim);
    for (auto _ : state) {
        BandCholesky chol;
        chol.factor(a);
        benchmark::DoNotOptimize(chol.solve(b));
    }
}
BENCHMARK(BM_banded_cholesky)->Arg(64)->Arg(512);

} // namespace
