#include <benchmark/benchmark.h>

#include "sie/calculus.hpp"
#include "sie/fredholm.hpp"
#include "sie/paths.hpp"
#include "sie/picard.hpp"

using namespace sie;

namespace {

SieProblem gbm() {
    return {0.0, 1.0, InitialLaw::constant(1.0), Coefficient::linear(TimeFunction::constant(0.05)),
            Coefficient::linear(TimeFunction::constant(0.2))};
}

void BM_SampleBrownian(benchmark::State& state) {
    const auto grid = make_grid(0, 1, static_cast<std::size_t>(state.range(0)));
    const auto n = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(sample_brownian(grid, n, 1));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_SampleBrownian)->Args({256, 10000})->Args({1000, 10000})->Unit(benchmark::kMillisecond);

void BM_ApplyOperator(benchmark::State& state) {
    const auto e = sample_brownian(make_grid(0, 1, static_cast<std::size_t>(state.range(0))),
                                   static_cast<std::size_t>(state.range(1)), 1);
    const auto x = brownian_process(e);
    const std::vector<double> h(e.n_paths(), 1.0);
    const auto problem = gbm();
    for (auto _ : state) benchmark::DoNotOptimize(apply_operator(problem, x, e, h));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_ApplyOperator)->Args({256, 10000})->Args({512, 20000})->Unit(benchmark::kMillisecond);

void BM_IsometryCheck(benchmark::State& state) {
    const auto e = sample_brownian(make_grid(0, 1, static_cast<std::size_t>(state.range(0))),
                                   static_cast<std::size_t>(state.range(1)), 1);
    const auto f = brownian_process(e);
    for (auto _ : state) benchmark::DoNotOptimize(isometry_check(f, e, 0.05));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_IsometryCheck)->Args({1000, 10000})->Unit(benchmark::kMillisecond);

void BM_ApplyFredholm(benchmark::State& state) {
    const auto n_quad = static_cast<std::size_t>(state.range(0));
    const FredholmProblem problem{0.0, 1.0, 1.0,
                                  Kernel::affine(TimeFunction::polynomial({0.0, 1.0}),
                                                 TimeFunction::polynomial({0.0, 1.0}), 0.25)};
    const auto nodes = trapezoid_nodes(0.0, 1.0, n_quad);
    const GridFunction u{nodes, std::vector<double>(nodes.size(), 0.5)};
    for (auto _ : state) benchmark::DoNotOptimize(apply_fredholm(problem, u, n_quad));
    state.SetItemsProcessed(state.iterations() * (state.range(0) + 1) * (state.range(0) + 1));
}
BENCHMARK(BM_ApplyFredholm)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
