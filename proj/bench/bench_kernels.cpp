// Serial reference kernels against their OpenMP counterparts, at the shapes
// the experiments use.

#include "enki/kernels.hpp"
#include "enki/models.hpp"

#include <benchmark/benchmark.h>

using namespace enki;

namespace {

Matrix random(Index rows, Index cols, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> n01;
    Matrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng);
    return m;
}

// args: state dimension, members
template <bool Parallel>
void ensemble_apply(benchmark::State& state) {
    const Index d = state.range(0);
    const Index j = state.range(1);
    const Matrix du = kernels::centered(random(d, j, 1));
    const Matrix dg = kernels::centered(random(d, j, 2));
    const Matrix w = random(d, j, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(Parallel ? kernels::ensemble_apply(du, dg, w)
                                          : kernels::reference::ensemble_apply(du, dg, w));
    }
}

template <bool Parallel>
void centered_product(benchmark::State& state) {
    const Index d = state.range(0);
    const Index j = state.range(1);
    const Matrix du = kernels::centered(random(d, j, 1));
    const Matrix dg = kernels::centered(random(d, j, 2));
    for (auto _ : state) {
        benchmark::DoNotOptimize(Parallel ? kernels::centered_product(du, dg)
                                          : kernels::reference::centered_product(du, dg));
    }
}

template <bool Parallel>
void evaluate_elliptic(benchmark::State& state) {
    const Index d = state.range(0);
    const Index j = state.range(1);
    const ForwardModel g = build_elliptic(d);
    const Matrix u = random(d, j, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(Parallel ? kernels::evaluate_columns(g, u)
                                          : kernels::reference::evaluate_columns(g, u));
    }
}

}  // namespace

BENCHMARK(ensemble_apply<false>)->Args({256, 20})->Args({1, 10000})->Args({2, 25});
BENCHMARK(ensemble_apply<true>)->Args({256, 20})->Args({1, 10000})->Args({2, 25});
BENCHMARK(centered_product<false>)->Args({256, 20})->Args({1, 10000});
BENCHMARK(centered_product<true>)->Args({256, 20})->Args({1, 10000});
BENCHMARK(evaluate_elliptic<false>)->Args({256, 20})->Args({1024, 100});
BENCHMARK(evaluate_elliptic<true>)->Args({256, 20})->Args({1024, 100});

BENCHMARK_MAIN();
