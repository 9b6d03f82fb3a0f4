#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hessex/barriers.hpp"
#include "hessex/errors.hpp"

namespace hessex {

namespace {

constexpr double kInvariantSlack = 1e-12;

double forced_rate(const ImplicitContext& ctx) {
    const auto& g = ctx.rhs();
    return g.c0() > 0.0 ? 0.5 * g.beta() : std::numeric_limits<double>::infinity();
}

[[noreturn]] void invariant_failure(const char* kind, const char* what, double s, double w, double bound) {
    std::ostringstream os;
    os.precision(17);
    os << kind << " profile: " << what << " at s = " << s << " (w = " << w << ", bound " << bound << ")";
    throw IntegrationError(os.str());
}

}  // namespace

BarrierProfile integrate_sub_w(const ImplicitContext& ctx, double xi2, double s_max, const OdeOptions& ode,
                               double s_start) {
    const double s0 = s_start > 0.0 ? s_start : ctx.rhs().s0();
    const double a1 = ctx.a().front(), an = ctx.a().back();
    if (!(xi2 >= ctx.w0(s0))) {
        std::ostringstream os;
        os << "integrate_sub_w: xi2 = " << xi2 << " must be >= w0(s0) = " << ctx.w0(s0);
        throw ArgumentError(os.str());
    }
    if (!(s_max > s0)) throw ArgumentError("integrate_sub_w: s_max must exceed s0");
    auto rhs = [&](double t, double y) {
        const double s = std::exp(t), w = 1.0 + y;
        return (ctx.h(s, w, false) - a1 * w) / (2.0 * an);
    };
    double prev = xi2;
    auto observe = [&](double t, double y) {
        const double s = std::exp(t), w = 1.0 + y;
        const double w0s = ctx.w0(s);
        if (w < w0s - kInvariantSlack * w0s) invariant_failure("sub", "w crossed w0", s, w, w0s);
        if (w > prev + kInvariantSlack * prev) invariant_failure("sub", "w increased", s, w, prev);
        prev = w;
    };
    const auto traj = integrate_dp5(rhs, std::log(s0), xi2 - 1.0, std::log(s_max), ode, observe);
    BarrierProfile p(BarrierProfile::Kind::Sub, 0.0, xi2, 0.0, traj, {alpha_of(ctx.op(), ctx.a()), forced_rate(ctx)});
    p.set_slope([ctx, a1, an](double s, double w) { return (ctx.h(s, w, false) - a1 * w) / (2.0 * an * s); });
    return p;
}

BarrierProfile integrate_super_w(const ImplicitContext& ctx, double eta2, double delta, double s_max,
                                 const OdeOptions& ode, double s_start) {
    const double s0 = s_start > 0.0 ? s_start : ctx.rhs().s0();
    const double a1 = ctx.a().front(), an = ctx.a().back();
    if (!(eta2 > 0.0 && eta2 <= ctx.W0(s0))) {
        std::ostringstream os;
        os << "integrate_super_w: eta2 = " << eta2 << " must lie in (0, W0(s0) = " << ctx.W0(s0) << "]";
        throw ArgumentError(os.str());
    }
    if (!(delta >= 0.0)) throw ArgumentError("integrate_super_w: delta must be nonnegative");
    if (!(s_max > s0)) throw ArgumentError("integrate_super_w: s_max must exceed s0");
    auto rhs = [&](double t, double y) {
        const double s = std::exp(t), w = 1.0 + y;
        return (ctx.H(s, w, false) - a1 * w) / (2.0 * an + delta);
    };
    double prev = eta2;
    auto observe = [&](double t, double y) {
        const double s = std::exp(t), w = 1.0 + y;
        const double W0s = ctx.W0(s);
        if (w > W0s + kInvariantSlack * W0s) invariant_failure("super", "w crossed W0", s, w, W0s);
        if (w < prev - kInvariantSlack * prev) invariant_failure("super", "w decreased", s, w, prev);
        prev = w;
    };
    const auto traj = integrate_dp5(rhs, std::log(s0), eta2 - 1.0, std::log(s_max), ode, observe);
    BarrierProfile p(BarrierProfile::Kind::Super, 0.0, eta2, delta, traj,
                     {alpha_delta(ctx.op(), ctx.a(), delta), forced_rate(ctx)});
    const double d = 2.0 * an + delta;
    p.set_slope([ctx, a1, d](double s, double w) { return (ctx.H(s, w, false) - a1 * w) / (d * s); });
    return p;
}

BarrierProfile integrate_radial_w(const ImplicitContext& ctx, double zeta2, double s_max, const OdeOptions& ode) {
    const double at = ctx.a_tilde();
    const double s_start = 0.5 * at;
    if (!(zeta2 >= 1.0)) throw ArgumentError("integrate_radial_w: zeta2 must be >= 1");
    if (!(s_max > s_start)) throw ArgumentError("integrate_radial_w: s_max must exceed a~/2");
    auto rhs = [&](double, double y) {
        const double w = 1.0 + y;
        return (ctx.hbar(w) - at * w) / (2.0 * at);
    };
    double prev = zeta2;
    auto observe = [&](double t, double y) {
        const double w = 1.0 + y;
        if (y < 0.0) invariant_failure("radial", "w dropped below 1", std::exp(t), w, 1.0);
        if (w > prev + kInvariantSlack * prev) invariant_failure("radial", "w increased", std::exp(t), w, prev);
        prev = w;
    };
    const auto traj = integrate_dp5(rhs, std::log(s_start), zeta2 - 1.0, std::log(s_max), ode, observe);
    // linearization of hbar at w = 1 gives y' = -(n/2) y in ln s
    const double n = static_cast<double>(ctx.a().size());
    BarrierProfile p(BarrierProfile::Kind::Radial, 0.0, zeta2, 0.0, traj, {0.5 * n});
    p.set_slope([ctx, at](double s, double w) { return (ctx.hbar(w) - at * w) / (2.0 * at * s); });
    return p;
}

double choose_delta(const SymmetricOperator& op, const std::vector<double>& a) {
    const double alpha = alpha_of(op, a);
    if (!(alpha > 1.0)) {
        std::ostringstream os;
        os << "choose_delta: alpha(A) = " << alpha << " must exceed 1";
        throw ArgumentError(os.str());
    }
    return a.back() * (alpha - 1.0);
}

double choose_K(const SymmetricOperator& op, const std::vector<double>& a, double sup_g) {
    if (!(sup_g > 0.0) || !std::isfinite(sup_g)) throw ArgumentError("choose_K: sup_g must be positive and finite");
    double K = solve_on_ray(op, a, sup_g);
    std::vector<double> ka(a.size());
    auto f_at = [&](double k) {
        for (std::size_t i = 0; i < a.size(); ++i) ka[i] = k * a[i];
        return op.eval(ka);
    };
    while (f_at(K) < sup_g) K = std::nextafter(K, std::numeric_limits<double>::infinity());
    return K;
}

}  // namespace hessex
