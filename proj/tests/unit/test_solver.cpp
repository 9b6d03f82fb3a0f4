#include <gtest/gtest.h>

#include <cmath>

#include "gen.hpp"
#include "hessex/errors.hpp"
#include "hessex/parallel.hpp"
#include "hessex/solver.hpp"
#include "ma_oracle.hpp"

using namespace hessex;

namespace {

ImplicitContext ma_flat() {
    return ImplicitContext(SymmetricOperator::hessian_root(3, 3), {1, 1, 1}, RightHandSide::constant(2.0));
}

double half_norm2(std::span<const double> x) { return 0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

struct RadialRun {
    RadialBarriers barriers;
    RadialSolution sol;
};

RadialRun radial_ma(double c, RadialOptions options = {}, int start = 0) {
    const auto ctx = ma_flat();
    const auto dom = DomainSpec::ball(3);
    auto rb = radial_barriers(ctx, dom, c);
    RadialFn lower = [sub = rb.sub](double s) { return sub.u(s); };
    RadialFn upper = [sup = rb.super](double s) { return sup.u(s); };
    // lower plus a ramp in s stays admissible and below upper, since upper - lower decreases
    RadialFn init;
    if (start > 0) {
        const double s_b = rb.s_boundary, s_R = options.s_outer_factor * ctx.rhs().s0();
        const double slope = (start == 1 ? 1.0 : 0.5) * (upper(s_R) - lower(s_R)) / (s_R - s_b);
        init = [=](double s) { return lower(s) + slope * (s - s_b); };
    }
    auto sol = solve_radial(ctx, rb.s_boundary, 0.0, lower, upper, options, init);
    return {std::move(rb), std::move(sol)};
}

const RadialRun& radial_ma3() {
    static const RadialRun run = radial_ma(3.0);
    return run;
}

}  // namespace

// ---------------------------------------------------------------------------
// finite-difference Hessian

TEST(HessianFd, QuadraticsExactIncludingCutCells) {
    hessex::testing::Gen gen(11);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> Q(9), b = gen.vec(3, -1.0, 1.0);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i; j < 3; ++j) Q[i * 3 + j] = Q[j * 3 + i] = gen.uniform(-1.0, 2.0);
        const double c0 = gen.uniform(-1.0, 1.0);
        BoundaryData phi{c0, b, Q};
        const DomainSpec dom({0.1, -0.05, 0.0}, {1.0, 0.8, 1.2}, phi);
        const CartesianGrid grid(dom, 15, 2.0);
        std::vector<double> u(grid.size());
        for (std::size_t id = 0; id < grid.size(); ++id) u[id] = phi.value(grid.position(id));
        ASSERT_GT(grid.cut_nodes(), 0u);
        double worst = 0.0;
        for (auto id : grid.unknowns()) {
            const auto H = assemble_hessian_fd(grid, u, id);
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j) worst = std::max(worst, std::abs(H(i, j) - Q[i * 3 + j]));
        }
        EXPECT_LT(worst, 1e-9) << "trial " << trial;
    }
}

TEST(HessianFd, QuarticSecondOrder) {
    // x = (1.5, 0.25, -1) is a node of both grids on [-2, 2]^3
    const std::array<double, 3> x{1.5, 0.25, -1.0};
    double err[2];
    std::size_t k = 0;
    for (std::size_t m : {17u, 33u}) {
        const CartesianGrid grid(DomainSpec::ball(3), m, 2.0);
        std::vector<double> u(grid.size());
        for (std::size_t id = 0; id < grid.size(); ++id) {
            const auto p = grid.position(id);
            u[id] = std::pow(p[0], 4) + std::pow(p[1], 4) + std::pow(p[2], 4) + p[0] * p[0] * p[1] * p[2];
        }
        const double h = grid.spacing();
        const auto at = [&](double v) { return static_cast<std::size_t>(std::lround((v + 2.0) / h)); };
        const std::size_t id = grid.index(at(x[0]), at(x[1]), at(x[2]));
        ASSERT_TRUE(grid.isotropic(id));
        const auto H = assemble_hessian_fd(grid, u, id);
        const double exact[3][3] = {{12 * x[0] * x[0] + 2 * x[1] * x[2], 2 * x[0] * x[2], 2 * x[0] * x[1]},
                                    {2 * x[0] * x[2], 12 * x[1] * x[1], x[0] * x[0]},
                                    {2 * x[0] * x[1], x[0] * x[0], 12 * x[2] * x[2]}};
        double e = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                e = std::max(e, std::abs(H(i, j) - exact[i][j]));
                EXPECT_EQ(H(i, j), H(j, i));
            }
        err[k++] = e;
    }
    EXPECT_NEAR(err[0] / err[1], 4.0, 0.05);
}

TEST(HessianFd, GridClassification) {
    const CartesianGrid grid(DomainSpec::ball(3), 12, 1.75);
    std::size_t inside = 0, dirichlet = 0;
    for (std::size_t id = 0; id < grid.size(); ++id) {
        const auto x = grid.position(id);
        switch (grid.kind(id)) {
        case CartesianGrid::Node::Inside: ++inside; EXPECT_LT(half_norm2(x), 0.5); break;
        case CartesianGrid::Node::Dirichlet: ++dirichlet; break;
        case CartesianGrid::Node::Unknown: EXPECT_GT(half_norm2(x), 0.5); break;
        }
    }
    EXPECT_GT(inside, 0u);
    EXPECT_EQ(dirichlet, 12u * 12u * 12u - 10u * 10u * 10u);
    EXPECT_EQ(inside + dirichlet + grid.unknowns().size(), grid.size());
    EXPECT_EQ(grid.stencil_fallbacks(), 0u);
    EXPECT_THROW(CartesianGrid(DomainSpec::ball(3), 12, 0.9), ArgumentError);
}

// ---------------------------------------------------------------------------
// far constant

TEST(FarConstant, ExactQuadraticOffset) {
    std::vector<double> s, u;
    for (int i = 1; i <= 500; ++i) {
        s.push_back(0.37 * i);
        u.push_back(s.back() + 7.0);
    }
    const auto [mean, sd] = estimate_far_constant(s, u);
    EXPECT_NEAR(mean, 7.0, 1e-12);
    EXPECT_LT(sd, 1e-12);
}

TEST(FarConstant, UsesOuterShellOnly) {
    const std::vector<double> s{1, 2, 7, 8.5, 10};
    const std::vector<double> u{100, 100, 0, 9.5, 11};
    EXPECT_DOUBLE_EQ(estimate_far_constant(s, u).first, 1.0);
}

// ---------------------------------------------------------------------------
// radial barriers

TEST(RadialBarriers, OrderedWithMatchingFarConstant) {
    const auto& rb = radial_ma3().barriers;
    EXPECT_EQ(rb.s_boundary, 0.5);
    EXPECT_EQ(rb.sub.first(), 0.0);
    EXPECT_NEAR(rb.sub.far_constant(), 3.0, 1e-10);
    EXPECT_LE(rb.sub.far_constant(), 3.0);
    EXPECT_NEAR(rb.super.far_constant(), 3.0, 1e-12);
    for (double s = 0.5; s < 1e5; s *= 1.3) EXPECT_LE(rb.sub.u(s), rb.super.u(s)) << s;
}

TEST(RadialBarriers, Preconditions) {
    const auto ctx = ma_flat();
    EXPECT_THROW(radial_barriers(ctx, DomainSpec::ball(3), -1.0), SpliceFailure);
    const DomainSpec shifted({0.1, 0.0, 0.0}, {1.0, 1.0, 1.0}, {});
    EXPECT_FALSE(symmetric_reduction_applies(ctx, shifted));
    EXPECT_THROW(radial_barriers(ctx, shifted, 3.0), ArgumentError);
    const ImplicitContext forced(SymmetricOperator::hessian_root(3, 3), {1, 1, 1},
                                 RightHandSide::oscillatory(0.5, 3.0, 2.0));
    EXPECT_FALSE(symmetric_reduction_applies(forced, DomainSpec::ball(3)));
    EXPECT_TRUE(symmetric_reduction_applies(ctx, DomainSpec::ball(3)));
}

// ---------------------------------------------------------------------------
// radial mode

TEST(RadialSolve, MatchesShootingOracle) {
    const auto& sol = radial_ma3().sol;
    const hessex::testing::MaShooting oracle(sol.s.front(), sol.s.back(), 0.0, 3.0);
    const auto ref = oracle.u(sol.s);
    double worst = 0.0;
    for (std::size_t j = 0; j < ref.size(); ++j) worst = std::max(worst, std::abs(sol.u[j] - ref[j]));
    EXPECT_LE(worst, 1e-6);
    EXPECT_TRUE(sol.report.converged);
    EXPECT_LE(sol.report.residual, 1e-8);
}

TEST(RadialSolve, SandwichAndResidualDecrease) {
    const auto& rep = radial_ma3().sol.report;
    EXPECT_GE(rep.lower_margin, -1e-9);
    EXPECT_GE(rep.upper_margin, -1e-9);
    EXPECT_EQ(rep.boundary_error, 0.0);
    const auto& h = rep.residual_history;
    ASSERT_GE(h.size(), 3u);
    for (std::size_t k = 1; 2 * k < h.size(); ++k) EXPECT_LE(h[2 * k], h[k]);
    for (std::size_t k = 1; k < h.size(); ++k) EXPECT_LT(h[k], h[k - 1]);
}

TEST(RadialSolve, FarConstantNearC) {
    const auto& rep = radial_ma3().sol.report;
    EXPECT_GT(rep.far_nodes, 100u);
    EXPECT_NEAR(rep.far_constant, 3.0, 2e-3);
}

TEST(RadialSolve, FarConstantMatchesOracleShell) {
    const auto& sol = radial_ma3().sol;
    const hessex::testing::MaShooting oracle(sol.s.front(), sol.s.back(), 0.0, 3.0);
    EXPECT_NEAR(sol.report.far_constant, estimate_far_constant(sol.s, oracle.u(sol.s)).first, 1e-7);
}

TEST(RadialSolve, FarConstantShiftsWithC) {
    const auto run4 = radial_ma(4.0);
    EXPECT_NEAR(run4.sol.report.far_constant - radial_ma3().sol.report.far_constant, 1.0, 1e-3);
}

TEST(RadialSolve, IndependentOfInitialization) {
    const auto& base = radial_ma3().sol;
    for (int start : {1, 2}) {
        const auto other = radial_ma(3.0, {}, start);
        double worst = 0.0;
        for (std::size_t j = 0; j < base.u.size(); ++j) worst = std::max(worst, std::abs(base.u[j] - other.sol.u[j]));
        EXPECT_LE(worst, 1e-6) << "start " << start;
    }
}

TEST(RadialSolve, Preconditions) {
    const auto ctx = ma_flat();
    auto q = [](double s) { return s; };
    RadialOptions bad;
    bad.nodes = 3;
    EXPECT_THROW(solve_radial(ctx, 0.5, 0.0, q, q, bad), ArgumentError);
    const ImplicitContext aniso(SymmetricOperator::hessian_root(3, 3), {0.8, 1.0, 1.25}, RightHandSide::constant(2.0));
    EXPECT_THROW(solve_radial(aniso, 0.5, 0.0, q, q), ArgumentError);
}

TEST(RadialSolve, CsvShape) {
    const auto csv = radial_field_csv(radial_ma3().sol);
    EXPECT_EQ(csv.rfind("# mode,radial\n", 0), 0u);
    EXPECT_NE(csv.find("\ns,u\n0.5,0\n"), std::string::npos);
}

// ---------------------------------------------------------------------------
// Full3D

namespace {

struct Full3DCase {
    RadialRun radial = radial_ma(3.0);
    FieldFn lower, upper, outer;

    Full3DCase() {
        lower = [this](std::span<const double> x) { return radial.barriers.sub.u(half_norm2(x)); };
        upper = [this](std::span<const double> x) { return radial.barriers.super.u(half_norm2(x)); };
        outer = [this](std::span<const double> x) { return radial.sol.at(half_norm2(x)); };
    }
    Full3DSolution run(std::size_t points, const FieldFn& init = nullptr) const {
        Full3DOptions o;
        o.points = points;
        return solve_full3d(ma_flat(), DomainSpec::ball(3), lower, upper, outer, o, init);
    }
};

const Full3DCase& full_case() {
    static const Full3DCase c;
    return c;
}

const Full3DSolution& coarse() {
    static const Full3DSolution sol = full_case().run(12);
    return sol;
}

}  // namespace

TEST(Full3DSolve, CoarseGridNearRadialSolution) {
    const auto& sol = coarse();
    const auto& rep = sol.report;
    EXPECT_TRUE(rep.converged);
    EXPECT_EQ(rep.cone_frozen, 0u);
    EXPECT_LE(rep.residual, 1e-7);
    EXPECT_GE(rep.lower_margin, -1e-9);
    EXPECT_GE(rep.upper_margin, -1e-9);
    double worst = 0.0;
    for (auto id : sol.grid.unknowns())
        worst = std::max(worst, std::abs(sol.u[id] - full_case().radial.sol.at(half_norm2(sol.grid.position(id)))));
    // h = 0.32 here; the 24^3 grid is held to 5e-3 by the acceptance suite
    EXPECT_LE(worst, 2e-2);
}

TEST(Full3DSolve, IndependentOfInitialization) {
    const auto& lower = full_case().lower;
    const auto raised = full_case().run(12, [&](std::span<const double> x) {
        return lower(x) + 0.01 * (half_norm2(x) - 0.5);
    });
    double worst = 0.0;
    for (auto id : coarse().grid.unknowns()) worst = std::max(worst, std::abs(coarse().u[id] - raised.u[id]));
    EXPECT_LE(worst, 1e-6);
}

TEST(Full3DSolve, DeterministicAcrossThreadCounts) {
    const unsigned saved = thread_limit();
    set_thread_limit(3);
    const auto threaded = full_case().run(12);
    set_thread_limit(saved);
    EXPECT_EQ(threaded.u.size(), coarse().u.size());
    for (std::size_t i = 0; i < threaded.u.size(); ++i) {
        if (std::isnan(coarse().u[i])) continue;
        ASSERT_EQ(threaded.u[i], coarse().u[i]) << i;
    }
    EXPECT_EQ(threaded.report.iterations, coarse().report.iterations);
}

TEST(Full3DSolve, QuadraticHasZeroResidual) {
    // u = |x|^2 / 2 + 1 solves det D^2 u = 1 with phi = 3/2 on the unit sphere
    const DomainSpec dom = DomainSpec::ball(3, 1.0, BoundaryData{1.5, {}, {}});
    FieldFn q = [](std::span<const double> x) { return half_norm2(x) + 1.0; };
    Full3DOptions o;
    o.points = 10;
    const auto sol = solve_full3d(ma_flat(), dom, q, q, q, o);
    EXPECT_LE(sol.report.residual, 1e-10);
    EXPECT_EQ(sol.report.iterations, 1u);
    EXPECT_NEAR(sol.report.far_constant, 1.0, 1e-12);
}

TEST(Full3DSolve, CsvShape) {
    const auto csv = full3d_field_csv(coarse());
    EXPECT_EQ(csv.rfind("# mode,full3d\n", 0), 0u);
    EXPECT_NE(csv.find("\nx,y,z,u\n"), std::string::npos);
    std::size_t rows = 0;
    for (char ch : csv) rows += ch == '\n';
    const std::size_t inside = coarse().grid.size() - coarse().grid.unknowns().size() -
                               (12u * 12u * 12u - 10u * 10u * 10u);
    EXPECT_EQ(rows, 4u + coarse().grid.size() - inside);
}
