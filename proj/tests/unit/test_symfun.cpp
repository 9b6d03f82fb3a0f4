#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "hessex/errors.hpp"
#include "hessex/symfun.hpp"

using namespace hessex;
using hessex::testing::Gen;

namespace {

std::vector<SymmetricOperator> builtin_ops(int n) {
    std::vector<SymmetricOperator> ops;
    for (int k = 1; k <= n; ++k) ops.push_back(SymmetricOperator::hessian_root(k, n));
    for (int k = 2; k <= n; ++k)
        for (int l = 1; l < k; ++l) ops.push_back(SymmetricOperator::hessian_quotient_root(k, l, n));
    ops.push_back(SymmetricOperator::special_lagrangian((n - 1) * std::numbers::pi / 2.0 + 0.1, n));
    return ops;
}

}  // namespace

TEST(SigmaK, SmallValues) {
    const std::vector<double> ones{1, 1, 1};
    EXPECT_DOUBLE_EQ(sigma_k(ones, 2), 3.0);
    const std::vector<double> v{1, 2, 3};
    EXPECT_DOUBLE_EQ(sigma_k(v, 3), 6.0);
    EXPECT_DOUBLE_EQ(sigma_k(v, 1), 6.0);
    EXPECT_DOUBLE_EQ(sigma_k(v, 2), 11.0);
    EXPECT_THROW(sigma_k(v, 0), ArgumentError);
    EXPECT_THROW(sigma_k(v, 4), ArgumentError);
}

TEST(SigmaK, MatchesSubsetEnumeration) {
    Gen gen(11);
    for (int trial = 0; trial < 400; ++trial) {
        const int n = gen.integer(2, 8);
        const auto lam = gen.vec(n, -2.0, 3.0);
        for (int k = 1; k <= n; ++k) {
            const double ref = hessex::testing::sigma_k_bruteforce(lam, k);
            EXPECT_NEAR(sigma_k(lam, k), ref, 1e-12 * std::max(1.0, std::abs(ref))) << "n=" << n << " k=" << k;
        }
    }
}

TEST(SigmaK, DeletedTuple) {
    const std::vector<double> v{1, 2, 3, 4};
    EXPECT_DOUBLE_EQ(sigma_k_deleted(v, 0, 2), 1.0);
    EXPECT_DOUBLE_EQ(sigma_k_deleted(v, -1, 2), 0.0);
    EXPECT_DOUBLE_EQ(sigma_k_deleted(v, 2, 2), 1 * 2 + 1 * 4 + 2 * 4);
    EXPECT_DOUBLE_EQ(sigma_k_deleted(v, 3, 0), 24.0);
}

TEST(Cone, Membership) {
    const auto g3 = ConeSpec::garding(3, 3);
    EXPECT_TRUE(cone_contains(g3, std::vector<double>{1, 1, 1}).inside);
    const auto m = cone_contains(g3, std::vector<double>{-1, 1, 3});
    EXPECT_FALSE(m.inside);
    // sigma_2 = -1 fails first, sigma_3 = -3 is the minimum
    EXPECT_EQ(m.failing_index, 2);
    EXPECT_DOUBLE_EQ(m.margin, -3.0);
    EXPECT_TRUE(cone_contains(ConeSpec::garding(1, 3), std::vector<double>{-1, -1, 3}).inside);
    EXPECT_FALSE(cone_contains(ConeSpec::positive_orthant(3), std::vector<double>{0, 1, 1}).inside);
}

TEST(Operator, Values) {
    const std::vector<double> ones{1, 1, 1};
    EXPECT_DOUBLE_EQ(SymmetricOperator::hessian_root(3, 3).eval(ones), 1.0);
    EXPECT_DOUBLE_EQ(SymmetricOperator::hessian_root(1, 3).eval(ones), 3.0);
    EXPECT_NEAR(SymmetricOperator::hessian_quotient_root(3, 1, 3).eval(std::vector<double>{1, 2, 3}), 1.0, 1e-15);
    const auto lag = SymmetricOperator::special_lagrangian(std::numbers::pi, 3);
    EXPECT_NEAR(lag.eval(ones), 3.0 * std::numbers::pi / 4.0 / std::numbers::pi, 1e-15);
}

TEST(Operator, OutsideConeThrowsWithIndex) {
    const auto op = SymmetricOperator::hessian_root(3, 3);
    try {
        op.eval(std::vector<double>{-1, 1, 3});
        FAIL() << "expected ConeViolation";
    } catch (const ConeViolation& e) {
        EXPECT_EQ(e.failing_index(), 2);
    }
}

TEST(Operator, ConstructionRejectsBadParameters) {
    EXPECT_THROW(SymmetricOperator::hessian_quotient_root(2, 2, 3), ArgumentError);
    EXPECT_THROW(SymmetricOperator::hessian_root(4, 3), ArgumentError);
    EXPECT_THROW(SymmetricOperator::special_lagrangian(1.0, 3), ArgumentError);
}

TEST(Operator, GradientExamples) {
    const std::vector<double> ones{1, 1, 1};
    for (double g : SymmetricOperator::hessian_root(3, 3).gradient(ones)) EXPECT_NEAR(g, 1.0 / 3.0, 1e-15);
    for (double g : SymmetricOperator::hessian_root(1, 3).gradient(std::vector<double>{-0.5, 2, 7}))
        EXPECT_DOUBLE_EQ(g, 1.0);
    const double theta = std::numbers::pi;
    for (double g : SymmetricOperator::special_lagrangian(theta, 3).gradient(ones))
        EXPECT_NEAR(g, 1.0 / (2.0 * theta), 1e-15);
}

TEST(OperatorProperty, GradientMatchesFiniteDifferences) {
    Gen gen(12);
    for (int n = 2; n <= 5; ++n) {
        for (const auto& op : builtin_ops(n)) {
            for (int trial = 0; trial < 60; ++trial) {
                auto lam = gen.in_cone(op.cone(), op.cone().kind == ConeSpec::Kind::PositiveOrthant ? 0.1 : -1.0);
                // keep finite differences away from the cone boundary
                if (cone_contains(op.cone(), lam).margin < 0.05) continue;
                const auto g = op.gradient(lam);
                const auto fd = hessex::testing::fd_gradient([&](const std::vector<double>& x) { return op.eval(x); }, lam);
                for (int i = 0; i < n; ++i)
                    EXPECT_NEAR(g[i], fd[i], 1e-6 * std::max(1.0, std::abs(g[i]))) << op.describe();
            }
        }
    }
}

TEST(OperatorProperty, PermutationSymmetry) {
    Gen gen(13);
    for (const auto& op : builtin_ops(4)) {
        for (int trial = 0; trial < 1000; ++trial) {
            auto lam = gen.in_cone(op.cone(), op.cone().kind == ConeSpec::Kind::PositiveOrthant ? 0.0 : -1.0);
            const double f = op.eval(lam);
            std::shuffle(lam.begin(), lam.end(), gen.engine());
            EXPECT_NEAR(op.eval(lam), f, 1e-14 * std::max(1.0, std::abs(f)));
        }
    }
}

TEST(OperatorProperty, HomogeneityAndEuler) {
    Gen gen(14);
    for (const auto& op : builtin_ops(4)) {
        if (!op.homogeneous()) continue;
        for (int trial = 0; trial < 200; ++trial) {
            const auto lam = gen.in_cone(op.cone());
            // homogeneity is exact; the test bound only holds away from cancellation near the boundary
            if (cone_contains(op.cone(), lam).margin < 0.1) continue;
            const double f = op.eval(lam);
            for (double t : {0.5, 2.0, 10.0}) {
                auto s = lam;
                for (auto& v : s) v *= t;
                EXPECT_NEAR(op.eval(s), t * f, 1e-12 * t * f);
            }
            const auto g = op.gradient(lam);
            double euler = 0;
            for (std::size_t i = 0; i < lam.size(); ++i) euler += lam[i] * g[i];
            EXPECT_NEAR(euler, f, 1e-10 * std::max(1.0, f));
        }
    }
}

TEST(OperatorProperty, MaxPartialAtSmallestEigenvalue) {
    Gen gen(15);
    for (const auto& op : builtin_ops(4)) {
        for (int trial = 0; trial < 300; ++trial) {
            const auto lam = gen.in_cone(op.cone(), op.cone().kind == ConeSpec::Kind::PositiveOrthant ? 0.0 : -1.0);
            const auto g = op.gradient(lam);
            const auto imin = std::min_element(lam.begin(), lam.end()) - lam.begin();
            EXPECT_GE(g[imin], *std::max_element(g.begin(), g.end()) * (1 - 1e-12)) << op.describe();
        }
    }
}

TEST(Normalization, AStar) {
    for (int n = 2; n <= 6; ++n) EXPECT_NEAR(solve_a_star(SymmetricOperator::hessian_root(n, n)), 1.0, 1e-12);
    EXPECT_NEAR(solve_a_star(SymmetricOperator::hessian_root(1, 3)), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(solve_a_star(SymmetricOperator::hessian_root(2, 3)), 1.0 / std::sqrt(3.0), 1e-15);
    for (int n = 2; n <= 5; ++n) {
        for (const auto& op : builtin_ops(n)) {
            const double a = solve_a_star(op);
            EXPECT_NEAR(op.eval(std::vector<double>(n, a)), 1.0, 1e-11) << op.describe();
        }
    }
}

TEST(Alpha, IdentityGivesHalfDimension) {
    for (int n : {3, 4}) {
        for (const auto& op : builtin_ops(n)) {
            const double a = solve_a_star(op);
            EXPECT_NEAR(alpha_of(op, std::vector<double>(n, a)), n / 2.0, 1e-12) << op.describe();
        }
    }
}

TEST(Alpha, AnisotropicMatchesFiniteDifferences) {
    const auto op = SymmetricOperator::hessian_root(3, 3);
    const auto a = normalize_onto_level(op, std::vector<double>{0.5, 1.0, 2.0});
    const auto fd = hessex::testing::fd_gradient([&](const std::vector<double>& x) { return op.eval(x); }, a);
    double num = 0;
    for (int i = 0; i < 3; ++i) num += a[i] * fd[i];
    EXPECT_NEAR(alpha_of(op, a), num / (2 * a[2] * fd[0]), 1e-8);
}

TEST(ValidateA, Examples) {
    const auto op = SymmetricOperator::hessian_root(3, 3);
    auto v = validate_A(op, std::vector<double>{1, 1, 1});
    EXPECT_TRUE(v.in_calA);
    EXPECT_TRUE(v.in_scriptA);
    EXPECT_NEAR(v.alpha, 1.5, 1e-14);
    EXPECT_FALSE(validate_A(op, std::vector<double>{2, 2, 2}).in_calA);

    // t (1, 2, 4) on the level set: det = 8 t^3 = 1 so t = 1/2; alpha = f / (2 a_3 d_1 f) with d_1 f = 1 / (3 t)
    const auto a = normalize_onto_level(op, std::vector<double>{1, 2, 4});
    EXPECT_NEAR(a[0], 0.5, 1e-14);
    v = validate_A(op, a);
    EXPECT_TRUE(v.in_calA);
    EXPECT_NEAR(v.alpha, 1.0 / (2 * 2.0 * (1.0 / 1.5)), 1e-12);
    EXPECT_FALSE(v.in_scriptA);
    EXPECT_THROW(validate_A(op, std::vector<double>{-1, 1, 1}), ArgumentError);
}

TEST(Structure, HessianRootPassesEverything) {
    for (int k = 1; k <= 3; ++k) {
        const auto rep = check_structure(SymmetricOperator::hessian_root(k, 3), 7, {0.5, 1.5});
        EXPECT_TRUE(rep.monotone.pass) << k;
        EXPECT_TRUE(rep.nu_condition.pass) << k;
        EXPECT_TRUE(rep.max_partial.pass) << k;
        EXPECT_TRUE(rep.r_shift.pass) << k;
        EXPECT_TRUE(rep.boundary_condition.pass) << k;
        EXPECT_GE(rep.cone_samples, 100u);
    }
}

TEST(Structure, QuotientFailsRShift) {
    const auto rep = check_structure(SymmetricOperator::hessian_quotient_root(3, 2, 3), 7, {0.5, 1.5});
    EXPECT_TRUE(rep.monotone.pass);
    EXPECT_TRUE(rep.nu_condition.pass);
    EXPECT_FALSE(rep.r_shift.pass);
    EXPECT_GT(rep.r_shift.failures, 0u);
}

TEST(Structure, LagrangianFailsNu) {
    const auto rep = check_structure(SymmetricOperator::special_lagrangian(std::numbers::pi, 3), 7, {0.5, 1.5});
    EXPECT_TRUE(rep.monotone.pass);
    EXPECT_FALSE(rep.nu_condition.pass);
    EXPECT_TRUE(rep.nu_heuristic);
}

TEST(Structure, DeterministicInSeed) {
    const auto op = SymmetricOperator::hessian_quotient_root(3, 1, 3);
    const auto a = check_structure(op, 99, {});
    const auto b = check_structure(op, 99, {});
    EXPECT_EQ(a.r_shift_witnesses, b.r_shift_witnesses);
    EXPECT_EQ(a.monotone.worst_margin, b.monotone.worst_margin);
}

TEST(Custom, WrapsCallables) {
    CustomFunctions fns;
    fns.value = [](std::span<const double> l) { return (l[0] + l[1]) / 2; };
    fns.gradient = [](std::span<const double>) { return std::vector<double>{0.5, 0.5}; };
    fns.name = "mean";
    const auto op = SymmetricOperator::custom(2, ConeSpec::garding(1, 2), fns);
    EXPECT_DOUBLE_EQ(op.eval(std::vector<double>{1, 3}), 2.0);
    EXPECT_NEAR(solve_a_star(op), 1.0, 1e-15);
    const auto rep = check_structure(op, 1, {});
    EXPECT_TRUE(rep.nu_heuristic);
}
