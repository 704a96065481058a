#include <benchmark/benchmark.h>

#include "elastoborn/bump.hpp"
#include "elastoborn/expansion.hpp"
#include "elastoborn/identity.hpp"
#include "elastoborn/iso.hpp"

using namespace elastoborn;

namespace {

const Background kBg(2.0, 1.0);

ScalarField sample_bump(int n) { return bump_field(Grid(n, 2.0), BumpSpec{{0.1, 0.0, -0.1}, 0.7, 1.0}); }

void BM_SpectralDerivative(benchmark::State& st) {
    auto f = sample_bump(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(diff(f, {2, 0, 0}, Backend::spectral));
}
BENCHMARK(BM_SpectralDerivative)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_FdDerivative(benchmark::State& st) {
    auto f = sample_bump(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(diff(f, {2, 0, 0}, Backend::fd));
}
BENCHMARK(BM_FdDerivative)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_RayAntiderivative(benchmark::State& st) {
    auto f = sample_bump(static_cast<int>(st.range(0)));
    const auto rule = st.range(1) ? RayRule::fourier : RayRule::upwind;
    for (auto _ : st) benchmark::DoNotOptimize(ray_antiderivative(f, {0, 1}, rule));
}
BENCHMARK(BM_RayAntiderivative)->Args({64, 0})->Args({64, 1})->Unit(benchmark::kMillisecond);

void BM_InvertBilaplacian(benchmark::State& st) {
    const auto p = SymbolPolynomial::bilaplacian();
    auto f = apply_symbol(sample_bump(static_cast<int>(st.range(0))), p);
    InvertOptions o;
    o.taper_radius = 0.0;
    for (auto _ : st) benchmark::DoNotOptimize(invert_symbol(f, p, o));
}
BENCHMARK(BM_InvertBilaplacian)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_PpExpansion(benchmark::State& st) {
    auto T = random_triple(Grid(static_cast<int>(st.range(0)), 2.0), 1);
    auto P = make_isotropic(T.lambda, T.mu, T.rho);
    for (auto _ : st) benchmark::DoNotOptimize(pp_expansion(P, kBg, {0, 1}));
}
BENCHMARK(BM_PpExpansion)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SymbolMatrixSigma(benchmark::State& st) {
    auto xi = sphere_samples(1, 1)[0];
    for (auto _ : st) benchmark::DoNotOptimize(sigma_min(symbol_matrix(xi, kBg).normalized()));
}
BENCHMARK(BM_SymbolMatrixSigma)->Unit(benchmark::kMicrosecond);

void BM_Reconstruct(benchmark::State& st) {
    auto T = random_triple(Grid(static_cast<int>(st.range(0)), 2.0), 1);
    auto Dp = data_functional_p(T.lambda, T.mu, T.rho, kBg);
    auto Ds = data_functional_s(T.lambda, T.mu, T.rho, kBg);
    for (auto _ : st) benchmark::DoNotOptimize(reconstruct(Dp, Ds, kBg));
}
BENCHMARK(BM_Reconstruct)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
