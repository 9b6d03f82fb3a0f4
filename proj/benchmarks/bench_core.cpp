#include <benchmark/benchmark.h>

#include <random>

#include "hessex/barriers.hpp"
#include "hessex/linalg.hpp"
#include "hessex/solver.hpp"
#include "hessex/symfun.hpp"

using namespace hessex;

namespace {

const std::vector<double> kI3{1, 1, 1};

ImplicitContext ma_flat() { return ImplicitContext(SymmetricOperator::hessian_root(3, 3), kI3, RightHandSide::constant(2.0)); }

void BM_SigmaK(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    std::vector<double> lam(n);
    for (auto& x : lam) x = u(rng);
    for (auto _ : state) benchmark::DoNotOptimize(sigma_k(lam, static_cast<int>(n / 2)));
}
BENCHMARK(BM_SigmaK)->Arg(3)->Arg(6)->Arg(12);

void BM_Eigen(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = u(rng);
    for (auto _ : state) benchmark::DoNotOptimize(eigenvalues_ascending(m));
}
BENCHMARK(BM_Eigen)->Arg(3)->Arg(6);

void BM_OperatorGradient(benchmark::State& state) {
    const auto op = SymmetricOperator::hessian_quotient_root(3, 1, 4);
    const std::vector<double> lam{0.5, 1.0, 1.5, 2.0};
    for (auto _ : state) benchmark::DoNotOptimize(op.gradient(lam));
}
BENCHMARK(BM_OperatorGradient);

void BM_ImplicitH(benchmark::State& state) {
    const auto op = SymmetricOperator::hessian_root(2, 3);
    const ImplicitContext ctx(op, normalize_onto_level(op, std::vector<double>{0.8, 1.0, 1.2}),
                              RightHandSide::radial(0.5, 3.0, 2.0));
    double s = 2.0;
    for (auto _ : state) {
        // fresh s each time so the memo cache does not answer
        s += 1e-7;
        benchmark::DoNotOptimize(ctx.h(s, ctx.w0(s) + 0.5));
    }
}
BENCHMARK(BM_ImplicitH);

void BM_SubProfile(benchmark::State& state) {
    const auto ctx = ma_flat();
    for (auto _ : state) benchmark::DoNotOptimize(integrate_sub_w(ctx, 2.0, 2e6).mu(2.0));
}
BENCHMARK(BM_SubProfile)->Unit(benchmark::kMillisecond);

void BM_RadialSolve(benchmark::State& state) {
    const auto ctx = ma_flat();
    const auto rb = radial_barriers(ctx, DomainSpec::ball(3), 3.0);
    RadialFn lower = [&](double s) { return rb.sub.u(s); };
    RadialFn upper = [&](double s) { return rb.super.u(s); };
    RadialOptions o;
    o.nodes = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_radial(ctx, rb.s_boundary, 0.0, lower, upper, o).report);
}
BENCHMARK(BM_RadialSolve)->Arg(2001)->Arg(20001)->Unit(benchmark::kMillisecond);

void BM_Full3DSolve(benchmark::State& state) {
    const auto ctx = ma_flat();
    const auto dom = DomainSpec::ball(3);
    const auto rb = radial_barriers(ctx, dom, 3.0);
    auto half = [](std::span<const double> x) { return 0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); };
    FieldFn lower = [&](std::span<const double> x) { return rb.sub.u(half(x)); };
    FieldFn upper = [&](std::span<const double> x) { return rb.super.u(half(x)); };
    Full3DOptions o;
    o.points = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_full3d(ctx, dom, lower, upper, upper, o).report);
}
BENCHMARK(BM_Full3DSolve)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
