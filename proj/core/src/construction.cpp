#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hessex/barriers.hpp"
#include "hessex/errors.hpp"
#include "hessex/parallel.hpp"
#include "hessex/roots.hpp"
#include "hessex/sampling.hpp"

namespace hessex {

namespace {

double half_quad(const std::vector<double>& a, std::span<const double> x) {
    double q = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) q += a[i] * x[i] * x[i];
    return 0.5 * q;
}

/// Smallest x >= lo with F(x) >= 0 for increasing F, to relative resolution ~1e-13.
/// The bracket grows by doubling the gap above lo.
template <class F>
double first_nonnegative(F&& fn, double lo, double gap, const char* what) {
    double f_lo = fn(lo);
    if (f_lo >= 0.0) return lo;
    double hi = lo + gap, f_hi = fn(hi);
    for (int k = 0; f_hi < 0.0; ++k) {
        if (k == 60) {
            std::ostringstream os;
            os << what << ": no admissible value up to " << hi;
            throw SpliceFailure(os.str());
        }
        lo = hi;
        f_lo = f_hi;
        gap *= 2.0;
        hi = lo + gap;
        f_hi = fn(hi);
    }
    const double xtol = 1e-13 * std::max(1.0, std::abs(hi));
    double x = brent(fn, {lo, hi, f_lo, f_hi}, xtol).x;
    double step = xtol;
    while (fn(x) < 0.0) {
        x = std::min(x + step, hi);
        step *= 2.0;
    }
    return x;
}

}  // namespace

BarrierSetup prepare_barriers(const ImplicitContext& ctx, const DomainSpec& domain,
                              const ConstructionOptions& options) {
    const auto& op = ctx.op();
    const auto& rhs = ctx.rhs();
    BarrierSetup st;
    st.a = ctx.a();
    const auto& a = st.a;
    const std::size_t n = a.size();
    if (domain.dimension() != n) throw ArgumentError("prepare_barriers: domain and A differ in dimension");
    st.s0 = rhs.s0();
    st.alpha = alpha_of(op, a);
    if (!(st.alpha > 1.0)) {
        std::ostringstream os;
        os << "prepare_barriers: alpha(A) = " << st.alpha << " must exceed 1";
        throw ArgumentError(os.str());
    }
    st.profile = options.profile;
    const double s_max = options.profile.s_max_factor * st.s0;
    const auto& ode = options.profile.ode;

    // B_1 in D in D_{s0}
    st.mesh = domain.boundary_mesh(options.boundary_points);
    for (const auto& p : st.mesh) {
        double r2 = 0.0;
        for (double v : p.x) r2 += v * v;
        if (r2 < 1.0 - 1e-12) throw DomainError("domain must contain the unit ball");
        if (!(half_quad(a, p.x) < st.s0)) throw DomainError("domain must lie inside D_{s0}");
    }
    st.phi_max = -std::numeric_limits<double>::infinity();
    for (const auto& p : st.mesh) st.phi_max = std::max(st.phi_max, p.phi);

    st.K = choose_K(op, a, rhs.sup_g());
    st.barriers = std::make_shared<const BoundaryBarrierSet>(
        build_boundary_barriers(domain, a, st.K, options.boundary_points));
    const auto& wb = *st.barriers;

    // ---- subsolution side
    st.s1 = options.s1 > 0.0 ? options.s1 : 2.0 * st.s0;
    st.s2 = options.s2 > 0.0 ? options.s2 : 4.0 * st.s0;
    if (!(st.s0 < st.s1 && st.s1 < st.s2)) throw ArgumentError("prepare_barriers: need s0 < s1 < s2");
    {
        const auto dirs = sphere_points(n, options.region_samples);
        const auto level_dirs = sphere_points(n, options.level_samples);
        std::vector<double> region(dirs.size()), inner(level_dirs.size()), outer(level_dirs.size());
        parallel_for(dirs.size(), [&](std::size_t i) {
            const double rin = domain.exit_radius(dirs[i]);
            const double rout = std::sqrt(st.s1 / half_quad(a, dirs[i]));
            const double r = rin + radical_inverse(i + 1, 7) * (rout - rin);
            std::vector<double> x(dirs[i]);
            for (auto& v : x) v *= r;
            region[i] = wb.value(x);
        });
        parallel_for(level_dirs.size(), [&](std::size_t i) {
            inner[i] = wb.value(onto_level_set(level_dirs[i], a, st.s1));
            outer[i] = wb.value(onto_level_set(level_dirs[i], a, st.s2));
        });
        st.level_s1_min_barrier = *std::min_element(inner.begin(), inner.end());
        st.level_s2_max_barrier = *std::max_element(outer.begin(), outer.end());
        double m = std::min(st.level_s1_min_barrier, *std::min_element(region.begin(), region.end()));
        for (const auto& p : st.mesh) m = std::min(m, p.phi);
        st.m = m;
    }
    auto outer_splice = [&](double xi2) {
        const auto p = integrate_sub_w(ctx, xi2, s_max, ode);
        return st.m + p.integral_w(st.s1, st.s2) - st.level_s2_max_barrier;
    };
    const double w0s0 = ctx.w0(st.s0);
    st.C_bar = first_nonnegative(outer_splice, w0s0, 1.0, "sub splice at s2");
    st.c_star_sub = st.m + integrate_sub_w(ctx, st.C_bar, s_max, ode).mu(st.s1);

    // ---- supersolution side
    if (rhs.inf_g() >= 1.0) {
        st.quadratic_super = true;
        st.c_star_super = -std::numeric_limits<double>::infinity();
        for (const auto& p : st.mesh) st.c_star_super = std::max(st.c_star_super, p.phi - half_quad(a, p.x));
        st.s_hat = st.s0;
        st.r1 = options.r1 > 0.0 ? options.r1 : 1.25 * std::sqrt(2.0 * st.s_hat / a.front());
        st.r2 = options.r2 > 0.0 ? options.r2 : 2.0 * st.r1;
    } else {
        st.eta2 = 0.5 * ctx.W0(st.s0);
        st.delta = choose_delta(op, a);
        st.alpha_delta = alpha_delta(op, a, st.delta);
        st.super_profile = integrate_super_w(ctx, st.eta2, st.delta, s_max, ode);
        const auto& U = *st.super_profile;
        st.mu_bar = U.mu(st.s0);
        st.mu_bar_error = U.mu_error_bound();
        st.s_bar = detect_s_bar(op, a, st.delta, U, options.s_bar_directions);
        st.s_hat = std::max(st.s_bar->s_bar, st.s0);
        const double r_min = std::sqrt(2.0 * st.s_hat / a.front());
        st.r1 = options.r1 > 0.0 ? options.r1 : 1.25 * r_min;
        st.r2 = options.r2 > 0.0 ? options.r2 : 2.0 * st.r1;
        if (!(st.r1 > r_min && st.r1 >= 1.0 && st.r2 > st.r1))
            throw ArgumentError("prepare_barriers: need D_{s^} inside B_{r1}, r1 >= 1 and r2 > r1");
        st.a_tilde = ctx.a_tilde();
        const double at = st.a_tilde;
        const double st1 = 0.5 * at * st.r1 * st.r1, st2 = 0.5 * at * st.r2 * st.r2;
        const double radial_max = std::max(s_max, 10.0 * st2);
        // the outer splice reduces to a comparison of increments, independent of eta1
        const double need = U.integral_w(st.s_hat, 0.5 * a.back() * st.r2 * st.r2);
        auto inc = [&](double zeta2) { return integrate_radial_w(ctx, zeta2, radial_max, ode).integral_w(st1, st2) - need; };
        st.zeta2_root = first_nonnegative(inc, 1.0, 1.0, "super splice at r2");
        st.zeta2 = options.zeta2_safety * st.zeta2_root;
        st.radial_profile = integrate_radial_w(ctx, st.zeta2, radial_max, ode);
        st.c_star_super = st.phi_max + st.radial_profile->integral_w(0.5 * at, st1) + st.mu_bar;
    }
    st.c_star = std::max(st.c_star_sub, st.c_star_super);
    return st;
}

SplicedBarriers build_barriers(const ImplicitContext& ctx, const DomainSpec& domain, const BarrierSetup& st,
                               double c, std::size_t sandwich_samples) {
    if (!(c > st.c_star)) {
        std::ostringstream os;
        os.precision(17);
        os << "c = " << c << " does not exceed c_star = " << st.c_star;
        throw SpliceFailure(os.str());
    }
    const auto& a = st.a;
    const double s_max = st.profile.s_max_factor * st.s0;
    const auto& ode = st.profile.ode;
    SpliceReport rep;
    rep.c = c;
    rep.c_star = st.c_star;
    rep.s1 = st.s1;
    rep.s2 = st.s2;
    rep.r1 = st.r1;
    rep.r2 = st.r2;
    rep.s_bar = st.s_bar ? st.s_bar->s_bar : st.s0;

    // sub: m + mu(s1, xi2) = c with xi2 > C_bar
    auto far = [&](double xi2) { return st.m + integrate_sub_w(ctx, xi2, s_max, ode).mu(st.s1) - c; };
    const double xi2 = first_nonnegative(far, st.C_bar, 1.0, "sub far-field constant");
    auto prof = integrate_sub_w(ctx, xi2, s_max, ode);
    const double xi1 = st.m - prof.integral_w(st.s0, st.s1);
    prof = prof.with_first(xi1);
    rep.xi1 = xi1;
    rep.xi2 = xi2;
    rep.far_field_mismatch = std::abs(prof.far_constant() - c);
    rep.sub_splice_inner = st.level_s1_min_barrier - prof.u(st.s1);
    rep.sub_splice_outer = prof.u(st.s2) - st.level_s2_max_barrier;
    Subsolution sub(st, std::move(prof));

    std::optional<Supersolution> super;
    if (st.quadratic_super) {
        super.emplace(st, c);
        rep.super_splice_inner = rep.super_splice_outer = 0.0;
    } else {
        const double eta1 = c - st.mu_bar;
        auto U = st.super_profile->with_first(eta1);
        const double M = U.u(st.s_hat);
        const double at = st.a_tilde;
        const double st1 = 0.5 * at * st.r1 * st.r1, st2 = 0.5 * at * st.r2 * st.r2;
        const double zeta1 = M - st.radial_profile->integral_w(0.5 * at, st1);
        auto v = st.radial_profile->with_first(zeta1);
        rep.eta1 = eta1;
        rep.eta2 = st.eta2;
        rep.delta = st.delta;
        rep.zeta1 = zeta1;
        rep.zeta2 = st.zeta2;
        rep.super_splice_inner = U.u(0.5 * a.front() * st.r1 * st.r1) - v.u(st1);
        rep.super_splice_outer = v.u(st2) - U.u(0.5 * a.back() * st.r2 * st.r2);
        super.emplace(st, std::move(U), std::move(v));
    }

    rep.super_boundary_margin = std::numeric_limits<double>::infinity();
    for (const auto& p : st.mesh) rep.super_boundary_margin = std::min(rep.super_boundary_margin, super->value(p.x) - p.phi);

    const auto pts = exterior_samples(domain, a, 10.0 * st.r2, sandwich_samples);
    std::vector<double> gap(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { gap[i] = super->value(pts[i]) - sub.value(pts[i]); });
    rep.sandwich_margin = pts.empty() ? 0.0 : *std::min_element(gap.begin(), gap.end());
    rep.sandwich_samples = pts.size();
    rep.ok = rep.sub_splice_inner >= 0.0 && rep.sub_splice_outer >= 0.0 && rep.super_splice_inner >= 0.0 &&
             rep.super_splice_outer >= 0.0 && rep.super_boundary_margin >= 0.0 && rep.sandwich_margin >= -1e-9;
    return {std::move(sub), std::move(*super), rep};
}

}  // namespace hessex
