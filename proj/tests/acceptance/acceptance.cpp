// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "gen.hpp"
#include "hessex/asympt.hpp"
#include "hessex/barriers.hpp"
#include "hessex/errors.hpp"
#include "hessex/linalg.hpp"
#include "hessex/solver.hpp"
#include "hessex/symfun.hpp"
#include "ma_oracle.hpp"

using namespace hessex;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const std::vector<double> kI3{1, 1, 1};

SymmetricOperator ma() { return SymmetricOperator::hessian_root(3, 3); }

double half_norm2(std::span<const double> x) { return 0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

// ---------------------------------------------------------------------------

Verdict criterion1() {
    const auto t0 = Clock::now();
    const ImplicitContext ctx(ma(), kI3, RightHandSide::constant(2.0));
    const auto p = integrate_sub_w(ctx, 2.0, 2e6);
    const double secs = seconds_since(t0);
    double worst = 0.0;
    for (double s = 2.0; s <= 2000.0; s *= 1.001) {
        const double exact = std::cbrt(1.0 + 7.0 * std::pow(2.0 / s, 1.5));
        worst = std::max(worst, std::abs(p.w(s) - exact) / exact);
    }
    return {worst <= 1e-8 && secs < 1.0, fmt("max_rel_err=%.3g (<= 1e-8) runtime=%.3fs (< 1s)", worst, secs)};
}

Verdict criterion2() {
    double worst = 0.0;
    int cases = 0;
    for (int n = 3; n <= 5; ++n) {
        std::vector<SymmetricOperator> ops;
        for (int k = 1; k <= n; ++k) {
            ops.push_back(SymmetricOperator::hessian_root(k, n));
            for (int l = 1; l < k; ++l) ops.push_back(SymmetricOperator::hessian_quotient_root(k, l, n));
        }
        for (const auto& op : ops) {
            if (!op.homogeneous()) continue;
            const std::vector<double> a(static_cast<std::size_t>(n), solve_a_star(op));
            worst = std::max(worst, std::abs(alpha_of(op, a) - 0.5 * n));
            ++cases;
        }
    }
    return {worst <= 1e-12, fmt("operators=%d max|alpha - n/2|=%.3g (<= 1e-12)", cases, worst)};
}

Verdict criterion3() {
    bool pass = true;
    std::string detail;
    for (double beta : {3.0, 2.5}) {
        const auto t0 = Clock::now();
        const ImplicitContext ctx(ma(), kI3, RightHandSide::radial(0.5, beta, 2.0));
        const auto p = integrate_sub_w(ctx, ctx.w0(2.0) + 1.0, 2e6);
        const auto fit = fit_profile_decay(p);
        const double secs = seconds_since(t0);
        const double expected = -std::min(1.5, beta / 2.0);
        const double rel = std::abs(fit.exponent - expected) / std::abs(expected);
        pass = pass && rel <= 0.1 && secs < 10.0;
        detail += fmt("beta=%g exponent=%.4f expected=%.4f rel=%.3g runtime=%.2fs; ", beta, fit.exponent, expected,
                      rel, secs);
    }
    return {pass, detail + "(rel <= 0.1, < 10s each)"};
}

struct Forced {
    ImplicitContext ctx{ma(), kI3, RightHandSide::oscillatory(0.5, 3.0, 2.0)};
    DomainSpec dom = DomainSpec::ball(3);
    BarrierSetup setup = prepare_barriers(ctx, dom);
    SplicedBarriers barriers = build_barriers(ctx, dom, setup, setup.c_star + 1.0);
    std::vector<std::vector<double>> points = exterior_samples(dom, ctx.a(), 10.0 * setup.r2, 10000);
};

const Forced& forced() {
    static const Forced f;
    return f;
}

Verdict criterion4() {
    const auto& F = forced();
    const auto iso = verify_subsolution(F.ctx, F.barriers.sub, F.points, 1e-8);
    std::string detail = fmt("isotropic: samples=%zu failures=%zu worst_margin=%.3g", iso.samples, iso.failures,
                             iso.worst_margin);
    bool pass = iso.failures == 0 && iso.samples == 10000;

    auto anisotropic = [&](std::vector<double> ray, const char* label) {
        const auto op = ma();
        const auto a = normalize_onto_level(op, ray);
        detail += fmt("; %s a=(%.4f,%.4f,%.4f) alpha=%.4f: ", label, a[0], a[1], a[2], alpha_of(op, a));
        try {
            const ImplicitContext ctx(op, a, RightHandSide::oscillatory(0.5, 3.0, 2.0));
            const auto dom = DomainSpec::ball(3);
            const auto setup = prepare_barriers(ctx, dom);
            const auto sb = build_barriers(ctx, dom, setup, setup.c_star + 1.0);
            const auto pts = exterior_samples(dom, a, 10.0 * setup.r2, 10000);
            const auto an = verify_subsolution(ctx, sb.sub, pts, 1e-8);
            detail += fmt("samples=%zu failures=%zu worst_margin=%.3g", an.samples, an.failures, an.worst_margin);
            return an.failures == 0;
        } catch (const Error& e) {
            detail += std::string("construction rejected: ") + e.what();
            return false;
        }
    };
    pass = anisotropic({1.0, 1.5, 2.5}, "anisotropic") && pass;
    // not counted: a ray inside the admissible set alpha > 1
    anisotropic({1.0, 1.2, 1.4}, "supplementary");
    return {pass, detail};
}

Verdict criterion5() {
    const auto& F = forced();
    const auto ch = verify_supersolution(F.ctx, F.barriers.super, F.points, F.setup.s_hat, 1e-8);
    std::map<Supersolution::Piece, std::size_t> pieces;
    for (const auto& x : F.points) ++pieces[F.barriers.super.eval(x).piece];
    const bool spliced = !F.barriers.super.quadratic();
    return {ch.failures == 0 && ch.samples == 10000 && spliced,
            fmt("samples=%zu failures=%zu worst_margin=%.3g s_hat=%.4g s_bar=%.4g active v/U=%zu/%zu", ch.samples,
                ch.failures, ch.worst_margin, F.setup.s_hat, F.barriers.report.s_bar,
                pieces[Supersolution::Piece::Radial], pieces[Supersolution::Piece::Profile])};
}

Verdict criterion6() {
    const auto& F = forced();
    double sandwich = INFINITY;
    for (const auto& x : F.points) sandwich = std::min(sandwich, F.barriers.super.value(x) - F.barriers.sub.value(x));
    const double c = F.barriers.report.c;
    const double s_hi = F.setup.profile.s_max_factor * F.setup.s0, s_lo = 0.1 * s_hi;
    auto offsets = [&](const auto& fn) {
        std::vector<double> out;
        for (double s = s_lo; s <= s_hi * (1 + 1e-12); s *= std::pow(10.0, 0.0625)) {
            const std::vector<double> x{std::sqrt(2.0 * s), 0.0, 0.0};
            out.push_back(fn(x) - s - c);
        }
        return out;
    };
    const auto sub = offsets([&](const auto& x) { return F.barriers.sub.value(x); });
    const auto sup = offsets([&](const auto& x) { return F.barriers.super.value(x); });
    bool monotone = true;
    for (std::size_t i = 1; i < sub.size(); ++i)
        monotone = monotone && sub[i - 1] < 0 && sub[i] > sub[i - 1] && sup[i - 1] > 0 && sup[i] < sup[i - 1];
    // alpha = beta/2 here, so offsets carry a ln s factor: the decade slope lies in [1 - p, 1 - p + shift]
    const double shift = std::log10(std::log(s_hi) / std::log(s_lo));
    const double alpha = F.setup.alpha, beta = 3.0;
    const double sub_rate = 1.0 - std::min(alpha, beta / 2.0);
    const double sup_rate = 1.0 - std::min(F.setup.alpha_delta, beta / 2.0);
    const double sub_slope = std::log10(sub.back() / sub.front());
    const double sup_slope = std::log10(sup.back() / sup.front());
    const bool rates = sub_slope >= sub_rate - 0.05 && sub_slope <= sub_rate + shift + 0.05 &&
                       std::abs(sup_slope - sup_rate) <= 0.1 * std::abs(sup_rate);
    return {sandwich >= -1e-9 && monotone && rates,
            fmt("min(u_bar - u_sub)=%.3g (>= -1e-9) monotone=%s sub_slope=%.4f (rate %.4f) super_slope=%.4f "
                "(rate 1-min(alpha_delta,beta/2)=%.4f) on s in [%.3g, %.3g]",
                sandwich, monotone ? "yes" : "no", sub_slope, sub_rate, sup_slope, sup_rate, s_lo, s_hi)};
}

// ---------------------------------------------------------------------------
// solver criteria

struct MaSolve {
    ImplicitContext ctx{ma(), kI3, RightHandSide::constant(2.0)};
    DomainSpec dom = DomainSpec::ball(3);
    RadialBarriers rb = radial_barriers(ctx, dom, 3.0);
    RadialFn lower = [this](double s) { return rb.sub.u(s); };
    RadialFn upper = [this](double s) { return rb.super.u(s); };
    RadialOptions options;
    double s_R = options.s_outer_factor * ctx.rhs().s0();

    RadialSolution radial(const RadialFn& init = nullptr) const {
        return solve_radial(ctx, rb.s_boundary, 0.0, lower, upper, options, init);
    }
    RadialFn ramp(double fraction) const {
        const double slope = fraction * (upper(s_R) - lower(s_R)) / (s_R - rb.s_boundary);
        return [=, this](double s) { return lower(s) + slope * (s - rb.s_boundary); };
    }
};

Verdict criterion7() {
    const auto t0 = Clock::now();
    const MaSolve P;
    const auto sol = P.radial();
    const hessex::testing::MaShooting oracle(sol.s.front(), sol.s.back(), 0.0, 3.0);
    const auto ref = oracle.u(sol.s);
    double radial_err = 0.0;
    for (std::size_t j = 0; j < ref.size(); ++j) radial_err = std::max(radial_err, std::abs(sol.u[j] - ref[j]));

    FieldFn lower = [&](std::span<const double> x) { return P.lower(half_norm2(x)); };
    FieldFn upper = [&](std::span<const double> x) { return P.upper(half_norm2(x)); };
    FieldFn outer = [&](std::span<const double> x) { return sol.at(half_norm2(x)); };
    Full3DOptions fo;
    fo.points = 24;
    const auto full = solve_full3d(P.ctx, P.dom, lower, upper, outer, fo);
    std::vector<double> s_nodes;
    for (auto id : full.grid.unknowns()) s_nodes.push_back(half_norm2(full.grid.position(id)));
    std::vector<double> sorted = s_nodes;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    const auto ref3 = oracle.u(sorted);
    double full_err = 0.0;
    std::size_t k = 0;
    for (auto id : full.grid.unknowns()) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), s_nodes[k++]);
        full_err = std::max(full_err, std::abs(full.u[id] - ref3[static_cast<std::size_t>(it - sorted.begin())]));
    }
    const double secs = seconds_since(t0);
    const bool pass = radial_err <= 1e-6 && sol.report.converged && full_err <= 5e-3 && full.report.converged &&
                      secs < 300.0;
    return {pass, fmt("radial max_err=%.3g (<= 1e-6, %zu nodes, %zu iterations) full3d_24^3 max_err=%.3g (<= 5e-3, "
                      "%zu unknowns, %zu sweeps, converged=%s) runtime=%.1fs (< 300s)",
                      radial_err, sol.s.size(), sol.report.iterations, full_err, full.grid.unknowns().size(),
                      full.report.iterations, full.report.converged ? "yes" : "no", secs)};
}

Verdict criterion8() {
    const MaSolve P;
    const auto a = P.radial();
    const auto b = P.radial(P.ramp(1.0));
    double radial = 0.0;
    for (std::size_t j = 0; j < a.u.size(); ++j) radial = std::max(radial, std::abs(a.u[j] - b.u[j]));

    FieldFn lower = [&](std::span<const double> x) { return P.lower(half_norm2(x)); };
    FieldFn upper = [&](std::span<const double> x) { return P.upper(half_norm2(x)); };
    FieldFn outer = [&](std::span<const double> x) { return a.at(half_norm2(x)); };
    Full3DOptions fo;
    fo.points = 12;
    const auto f1 = solve_full3d(P.ctx, P.dom, lower, upper, outer, fo);
    const auto f2 = solve_full3d(P.ctx, P.dom, lower, upper, outer, fo, [&](std::span<const double> x) {
        return lower(x) + 0.01 * (half_norm2(x) - 0.5);
    });
    double full = 0.0;
    for (auto id : f1.grid.unknowns()) full = std::max(full, std::abs(f1.u[id] - f2.u[id]));
    const bool pass = radial <= 1e-6 && full <= 1e-6 && a.report.converged && b.report.converged &&
                      f1.report.converged && f2.report.converged;
    return {pass, fmt("radial max|u1 - u2|=%.3g full3d_12^3 max|u1 - u2|=%.3g (<= 1e-6)", radial, full)};
}

// ---------------------------------------------------------------------------

Verdict criterion9() {
    hessex::testing::Gen gen(9);
    std::size_t violations = 0, inequalities = 0;
    double worst = INFINITY;
    bool library_agrees = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = static_cast<std::size_t>(gen.integer(1, 6));
        const auto A = gen.symmetric(n, 2.0), B = gen.symmetric(n, 2.0);
        const auto l1 = eigenvalues_ascending(A), l2 = eigenvalues_ascending(B), l = eigenvalues_ascending(A + B);
        // 1-based: l_i(A+B) <= l_{i+j}(A) + l_{n-j}(B) for 0 <= j <= n-i,
        //          l_i(A+B) >= l_{i-j+1}(A) + l_j(B) for 1 <= j <= i
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t j = 0; j <= n - i; ++j) {
                const double m = l1[i + j - 1] + l2[n - j - 1] - l[i - 1];
                worst = std::min(worst, m);
                violations += m < -1e-10;
                ++inequalities;
            }
            for (std::size_t j = 1; j <= i; ++j) {
                const double m = l[i - 1] - l1[i - j] - l2[j - 1];
                worst = std::min(worst, m);
                violations += m < -1e-10;
                ++inequalities;
            }
        }
        library_agrees = library_agrees && weyl_check(A, B);
    }

    std::size_t sandwich_bad = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const auto n = static_cast<std::size_t>(gen.integer(2, 6));
        const auto a = gen.ascending_positive(n, 0.1, 5.0);
        const auto x = gen.vec(n, -3.0, 3.0);
        const double u1 = gen.uniform(0.01, 4.0);
        const double u2 = gen.uniform(-2.0, 2.0);
        double q = 0.0;
        for (std::size_t j = 0; j < n; ++j) q += a[j] * a[j] * x[j] * x[j];
        const auto e = eigenvalues_ascending(hessian_generalized(a, x, u1, u2));
        for (std::size_t i = 0; i < n; ++i) {
            const double lo = a[i] * u1 + std::min(0.0, q * u2), hi = a[i] * u1 + std::max(0.0, q * u2);
            const double tol = 1e-10 * (a[i] * u1 + q * std::abs(u2) + 1.0);
            sandwich_bad += e[i] < lo - tol || e[i] > hi + tol;
        }
    }
    return {violations == 0 && library_agrees && sandwich_bad == 0,
            fmt("weyl: %zu inequalities over 1000 pairs, violations=%zu worst_margin=%.3g, weyl_check agrees=%s; "
                "sandwich: 10000 hessians, violations=%zu",
                inequalities, violations, worst, library_agrees ? "yes" : "no", sandwich_bad)};
}

Verdict criterion10() {
    const GBounds g{0.5, 1.5};
    bool root_ok = true;
    for (int n = 2; n <= 5; ++n)
        for (int k = 1; k <= n; ++k) {
            const auto r = check_structure(SymmetricOperator::hessian_root(k, n), 7, g);
            root_ok = root_ok && r.monotone.pass && r.boundary_condition.pass && r.nu_condition.pass &&
                      r.max_partial.pass && r.r_shift.pass;
        }
    bool quot_ok = true;
    for (int n = 2; n <= 5; ++n)
        for (int k = 2; k <= n; ++k)
            for (int l = 1; l < k; ++l) {
                const auto r = check_structure(SymmetricOperator::hessian_quotient_root(k, l, n), 7, g);
                quot_ok = quot_ok && r.monotone.pass && r.nu_condition.pass && !r.r_shift.pass;
            }
    bool lag_ok = true;
    for (int n = 2; n <= 4; ++n) {
        const double theta = (n - 1) * std::numbers::pi / 2.0 + 0.1;
        const auto r = check_structure(SymmetricOperator::special_lagrangian(theta, n), 7, g);
        lag_ok = lag_ok && r.monotone.pass && !r.nu_condition.pass;
    }
    return {root_ok && quot_ok && lag_ok,
            fmt("hessian_root passes all=%s quotient fails r_shift only=%s special_lagrangian fails nu=%s",
                root_ok ? "yes" : "no", quot_ok ? "yes" : "no", lag_ok ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<std::function<Verdict()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7, criterion8,
                                                         criterion9, criterion10};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i]();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        failed += !v.pass;
        std::printf("criterion %zu: %s %s\n", i + 1, v.pass ? "PASS" : "FAIL", v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
