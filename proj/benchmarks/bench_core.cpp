#include <benchmark/benchmark.h>

#include <cmath>

#include "sbridge/generators.hpp"
#include "sbridge/kernels.hpp"
#include "sbridge/schrodinger.hpp"
#include "sbridge/sobolev.hpp"

using namespace sbridge;

static void BM_LogMatvec(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto K = GibbsKernel::ou(Grid::uniform(-6, 6, n), 0.25, 1.0);
    std::vector<double> v(n), out(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(0.1 * i);
    for (auto _ : state) {
        log_matvec(K.row(0), n, v.data(), out.data());
        benchmark::DoNotOptimize(out.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LogMatvec)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

static void BM_ApplySemigroup(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto K = GibbsKernel::ou(Grid::uniform(-6, 6, n), 0.25, 1.0);
    auto ref = K.reference();
    std::vector<double> lf(n, 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(apply_semigroup(K, lf, ref));
}
BENCHMARK(BM_ApplySemigroup)->Arg(128)->Arg(512);

static void BM_Solve(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto g = Grid::uniform(-6, 6, n);
    auto [mu, nu] = random_pair(g, 1, 0);
    auto K = GibbsKernel::ou(g, 0.25, 1.0);
    std::size_t iters = 0;
    for (auto _ : state) {
        auto s = solve(mu, nu, K);
        iters = s.iterations;
        benchmark::DoNotOptimize(s.cost_CT);
    }
    state.counters["sweeps"] = static_cast<double>(iters);
}
BENCHMARK(BM_Solve)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_HMinusOne(benchmark::State& state) {
    auto g = state.range(0) == 1 ? Grid::uniform(-6, 6, 512) : Grid::uniform2d(-3, 3, 32, -3, 3, 32);
    auto f = perturbation_family(g, 2, 0, 0.2, 0);
    auto d = difference(f.mu, f.mu_bar);
    for (auto _ : state) benchmark::DoNotOptimize(h_minus_one_norm(d, f.mu));
}
BENCHMARK(BM_HMinusOne)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
