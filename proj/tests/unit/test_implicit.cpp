#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "gen.hpp"
#include "hessex/errors.hpp"
#include "hessex/implicit.hpp"

using namespace hessex;

namespace {

const std::vector<double> kI3{1, 1, 1};

ImplicitContext ma_context(double c0 = 0.5, double beta = 3.0) {
    return ImplicitContext(SymmetricOperator::hessian_root(3, 3), kI3, RightHandSide::oscillatory(c0, beta, 2.0));
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace

TEST(RightHandSide, Envelope) {
    const auto r = RightHandSide::oscillatory(0.5, 3.0, 2.0);
    EXPECT_DOUBLE_EQ(r.g_upper(4.0), 1.0625);
    EXPECT_DOUBLE_EQ(r.g_lower(4.0), 0.9375);
    EXPECT_DOUBLE_EQ(r.g_upper(1.0), r.g_upper(2.0));
    EXPECT_NEAR(r.inf_g(), 1 - 0.5 * std::pow(2.0, -1.5), 1e-15);
    EXPECT_NO_THROW(r.validate(kI3, 3));
    EXPECT_THROW(RightHandSide::oscillatory(0.5, 2.0, 2.0), ArgumentError);
    EXPECT_THROW(RightHandSide::radial(0.5, 3.0, 1.0), ArgumentError);
}

TEST(RightHandSide, TabulatedOutsideEnvelopeIsRejected) {
    const auto r = RightHandSide::tabulated(0.1, 3.0, 2.0, {2.0, 4.0, 8.0}, {1.5, 1.2, 1.1});
    EXPECT_THROW(r.validate(kI3, 4), ArgumentError);
    const auto ok = RightHandSide::tabulated(0.5, 3.0, 2.0, {2.0, 4.0, 8.0}, {1.1, 1.05, 1.01});
    EXPECT_NO_THROW(ok.validate(kI3, 4));
    EXPECT_DOUBLE_EQ(ok.radial_value(3.0), 1.075);
}

TEST(Implicit, ConstantRhsIsTrivial) {
    ImplicitContext ctx(SymmetricOperator::hessian_root(3, 3), kI3, RightHandSide::constant());
    for (double s : {2.0, 10.0, 1e4}) {
        EXPECT_EQ(ctx.w0(s), 1.0);
        EXPECT_EQ(ctx.W0(s), 1.0);
        EXPECT_EQ(ctx.h(s, 1.0), 1.0);
    }
}

TEST(Implicit, MongeAmpereClosedForms) {
    const auto ctx = ma_context();
    const auto& r = ctx.rhs();
    EXPECT_NEAR(ctx.w0(4.0), 1.0625, 1e-15);
    EXPECT_NEAR(ctx.W0(4.0), 0.9375, 1e-15);
    for (double s : {2.0, 3.0, 7.5, 100.0}) {
        for (double w : {1.3, 2.0, 5.0}) {
            if (w < ctx.w0(s)) continue;
            EXPECT_LT(rel(ctx.h(s, w), std::pow(r.g_upper(s), 3) / (w * w)), 1e-10);
        }
        for (double w : {0.2, 0.5, 0.9}) {
            if (w > ctx.W0(s)) continue;
            EXPECT_LT(rel(ctx.H(s, w), std::pow(r.g_lower(s), 3) / (w * w)), 1e-10);
        }
    }
    const double at = ctx.a_tilde();
    EXPECT_LT(rel(at, r.inf_g()), 1e-12);
    for (double w : {0.5, 1.0, 2.0, 30.0}) EXPECT_LT(rel(ctx.hbar(w), std::pow(r.inf_g(), 3) / (at * at * w * w)), 1e-10);
}

TEST(Implicit, LaplacianClosedForm) {
    // f = sigma_1, A = I/3 so that f(A) = 1
    const std::vector<double> a(3, 1.0 / 3.0);
    ImplicitContext ctx(SymmetricOperator::hessian_root(1, 3), a, RightHandSide::oscillatory(0.5, 3.0, 2.0));
    for (double s : {2.0, 5.0}) {
        for (double w : {1.2, 3.0}) {
            // f(h, w/3, w/3) = h + 2w/3
            EXPECT_NEAR(ctx.h(s, w), ctx.rhs().g_upper(s) - 2.0 * w / 3.0, 1e-14);
        }
    }
}

TEST(Implicit, ATilde) {
    const auto half = RightHandSide::oscillatory(0.5 / std::pow(2.0, -1.5), 3.0, 2.0);
    EXPECT_NEAR(half.inf_g(), 0.5, 1e-15);
    EXPECT_NEAR(ImplicitContext(SymmetricOperator::hessian_root(3, 3), kI3, half).a_tilde(), 0.5, 1e-14);
    const std::vector<double> a(3, 1.0 / 3.0);
    EXPECT_NEAR(ImplicitContext(SymmetricOperator::hessian_root(1, 3), a, half).a_tilde(), 1.0 / 6.0, 1e-15);
    EXPECT_EQ(ImplicitContext(SymmetricOperator::hessian_root(3, 3), kI3, RightHandSide::constant()).a_tilde(), 1.0);
}

TEST(Implicit, EquilibriaAreExact) {
    const auto ctx = ma_context();
    for (double s : {2.0, 9.0}) {
        EXPECT_EQ(ctx.h(s, ctx.w0(s)), ctx.w0(s));
        EXPECT_EQ(ctx.H(s, ctx.W0(s)), ctx.W0(s));
    }
    EXPECT_EQ(ctx.hbar(1.0), ctx.a_tilde());
}

TEST(Implicit, DomainErrors) {
    const auto ctx = ma_context();
    EXPECT_THROW(ctx.h(4.0, 1.0), DomainError);
    EXPECT_THROW(ctx.H(4.0, 1.0), DomainError);
    EXPECT_THROW(ctx.H(4.0, -0.1), DomainError);
    EXPECT_NO_THROW(ctx.h(4.0, 1.0, false));
}

TEST(Implicit, ContextRequiresNormalizedA) {
    EXPECT_THROW(ImplicitContext(SymmetricOperator::hessian_root(3, 3), {2, 2, 2}, RightHandSide::constant()),
                 NormalizationError);
}

TEST(Implicit, QuotientHitsRShift) {
    // (sigma_3 / sigma_2)^{1} stays below 1 as lambda_1 grows once the rest is small
    const auto op = SymmetricOperator::hessian_quotient_root(3, 2, 3);
    const double t = solve_a_star(op);
    const std::vector<double> a(3, t);
    ImplicitContext ctx(op, a, RightHandSide::oscillatory(0.5, 3.0, 2.0));
    bool failed = false;
    for (double w = ctx.W0(2.0); w > 1e-6; w *= 0.5) {
        try {
            ctx.H(2.0, w);
        } catch (const StructuralError& e) {
            EXPECT_EQ(e.condition(), "r_shift");
            failed = true;
            break;
        }
    }
    EXPECT_TRUE(failed);
}

TEST(ImplicitProperty, ResidualsAndMonotonicity) {
    hessex::testing::Gen gen(31);
    std::vector<SymmetricOperator> ops{SymmetricOperator::hessian_root(3, 3), SymmetricOperator::hessian_root(2, 3),
                                       SymmetricOperator::hessian_root(1, 3),
                                       SymmetricOperator::hessian_quotient_root(3, 1, 3)};
    for (const auto& op : ops) {
        auto a = normalize_onto_level(op, std::vector<double>{1.0, 1.1, 1.2});
        ImplicitContext ctx(op, a, RightHandSide::oscillatory(0.5, 3.0, 2.0));
        const auto& r = ctx.rhs();
        double prev_w0 = std::numeric_limits<double>::infinity(), prev_W0 = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double s = 2.0 * std::pow(1.1, i);
            const double w0 = ctx.w0(s), W0 = ctx.W0(s);
            EXPECT_LE(w0, prev_w0);
            EXPECT_GE(W0, prev_W0);
            EXPECT_LT(W0, w0);
            prev_w0 = w0;
            prev_W0 = W0;
            std::vector<double> p(a);
            for (auto& v : p) v *= w0;
            EXPECT_NEAR(op.eval(p), r.g_upper(s), 1e-11);
        }
        for (int trial = 0; trial < 50; ++trial) {
            const double s = gen.log_uniform(2.0, 1e3);
            double prev_h = std::numeric_limits<double>::infinity();
            for (int i = 0; i < 100; ++i) {
                const double w = ctx.w0(s) * (1.0 + 0.02 * i);
                const double hv = ctx.h(s, w);
                std::vector<double> p{hv, a[1] * w, a[2] * w};
                EXPECT_NEAR(op.eval(p), r.g_upper(s), 1e-11);
                if (i > 0) EXPECT_LT(hv, prev_h) << op.describe();
                prev_h = hv;
            }
        }
    }
}

TEST(ImplicitProperty, DerivativeInW) {
    const auto op = SymmetricOperator::hessian_root(2, 3);
    const auto a = normalize_onto_level(op, std::vector<double>{1.0, 1.1, 1.2});
    ImplicitContext ctx(op, a, RightHandSide::oscillatory(0.5, 3.0, 2.0));
    for (double s : {2.0, 6.0, 40.0}) {
        for (double w : {1.2, 1.7, 3.0}) {
            const double d = 1e-5 * w;
            const double fd = (ctx.h(s, w + d) - ctx.h(s, w - d)) / (2 * d);
            const std::vector<double> p{ctx.h(s, w), a[1] * w, a[2] * w};
            const auto g = op.gradient(p);
            const double formula = -(a[1] * g[1] + a[2] * g[2]) / g[0];
            EXPECT_NEAR(fd, formula, 1e-5 * std::abs(formula));
        }
    }
}

TEST(ImplicitProperty, CacheIsThreadSafeAndOrderIndependent) {
    const auto ctx = ma_context();
    std::vector<double> ref(400);
    for (int i = 0; i < 400; ++i) ref[i] = ma_context().h(2.0 + 0.01 * i, 3.0);
    std::vector<std::thread> pool;
    std::vector<std::vector<double>> got(4, std::vector<double>(400));
    for (int t = 0; t < 4; ++t)
        pool.emplace_back([&, t] {
            for (int k = 0; k < 400; ++k) {
                const int i = (t % 2 == 0) ? k : 399 - k;
                got[t][i] = ctx.h(2.0 + 0.01 * i, 3.0);
            }
        });
    for (auto& th : pool) th.join();
    for (int t = 0; t < 4; ++t) EXPECT_EQ(got[t], ref);
    EXPECT_GT(ctx.cache_size(), 0u);
}
