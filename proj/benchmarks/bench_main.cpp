#include <benchmark/benchmark.h>

#include "bsl/bargmann.hpp"
#include "bsl/spectral.hpp"
#include "bsl/symbols.hpp"

using namespace bsl;

namespace {

MonomialSymbol rotated_oscillator() { return quadratic_pq_symbol(1.0, std::polar(1.0, 0.9 * kPi / 2), 0.0); }

void BM_Assemble(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    MonomialSymbol s{{{2, 2}, 1.0}, {{2, 0}, -1.0}, {{0, 2}, -1.0}, {{0, 0}, 1.0}, {{1, 1}, 0.5}};
    for (auto _ : state) benchmark::DoNotOptimize(assemble_toeplitz(s, PlanckParameter(0.05), BasisTruncation(n)));
}
BENCHMARK(BM_Assemble)->Arg(128)->Arg(512)->Arg(2048);

void BM_SigmaMin(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto method = state.range(1) == 0 ? SigmaMethod::Dense : SigmaMethod::Banded;
    const auto M = assemble_toeplitz(rotated_oscillator(), PlanckParameter(0.05), BasisTruncation(n));
    for (auto _ : state) benchmark::DoNotOptimize(smallest_singular_value(M, {0.2, 0.1}, method));
    state.SetLabel(method == SigmaMethod::Dense ? "dense" : "banded");
}
BENCHMARK(BM_SigmaMin)->Args({128, 0})->Args({128, 1})->Args({256, 0})->Args({256, 1})->Unit(benchmark::kMillisecond);

void BM_ResolventGrid(benchmark::State& state) {
    const int g = static_cast<int>(state.range(0));
    const auto M = assemble_toeplitz(rotated_oscillator(), PlanckParameter(0.05), BasisTruncation(256));
    for (auto _ : state) benchmark::DoNotOptimize(resolvent_grid(M, {0.0, 0.4, -0.05, 0.35}, g, g));
    state.SetItemsProcessed(state.iterations() * g * g);
}
BENCHMARK(BM_ResolventGrid)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SharpProduct(benchmark::State& state) {
    const int D = static_cast<int>(state.range(0));
    FormalSymbol f(3, D), g(3, D);
    for (int k = 0; k <= 3; ++k)
        for (int a = 0; a <= D / 2; ++a)
            for (int b = 0; a + b <= D / 2; ++b) {
                f[k].set(a, b, cplx(1.0 / (1 + a + k), 0.1 * b));
                g[k].set(a, b, cplx(0.3 * a, 1.0 / (1 + b + k)));
            }
    for (auto _ : state) benchmark::DoNotOptimize(sharp_product(f, g));
}
BENCHMARK(BM_SharpProduct)->Arg(8)->Arg(16)->Arg(24);

void BM_Eigenvalues(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto M = assemble_toeplitz(rotated_oscillator(), PlanckParameter(0.05), BasisTruncation(n));
    for (auto _ : state) benchmark::DoNotOptimize(dense_eigenvalues(M.entries));
}
BENCHMARK(BM_Eigenvalues)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
