#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hessex/errors.hpp"
#include "hessex/format.hpp"
#include "hessex/roots.hpp"
#include "hessex/solver.hpp"

namespace hessex {

namespace {

bool all_zero(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

bool symmetric_reduction_applies(const ImplicitContext& ctx, const DomainSpec& domain) {
    const auto& a = ctx.a();
    if (domain.dimension() != a.size()) return false;
    if (!std::all_of(a.begin(), a.end(), [&](double v) { return v == a.front(); })) return false;
    if (!domain.is_centered_ball() || !ctx.rhs().is_radial()) return false;
    const auto& phi = domain.phi();
    if (!all_zero(phi.linear)) return false;
    const std::size_t n = a.size();
    if (!phi.quadratic.empty()) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (phi.quadratic[i * n + j] != (i == j ? phi.quadratic[0] : 0.0)) return false;
    }
    return true;
}

RadialBarriers radial_barriers(const ImplicitContext& ctx, const DomainSpec& domain, double c,
                               const ProfileOptions& options) {
    if (!symmetric_reduction_applies(ctx, domain))
        throw ArgumentError("radial_barriers: problem is not radially symmetric");
    const double a = ctx.a().front();
    const double rho = domain.semi_axes().front();
    std::vector<double> x(domain.dimension(), 0.0);
    x[0] = rho;
    const double phi = domain.phi().value(x);
    const double sb = 0.5 * a * rho * rho;
    if (!(sb < ctx.rhs().s0())) throw DomainError("radial_barriers: boundary shell must lie below s0");
    const double s_max = options.s_max_factor * ctx.rhs().s0();

    // sub: u(s_b) = phi, far constant c from below
    auto sub_far = [&](double xi) { return phi + integrate_sub_w(ctx, xi, s_max, options.ode, sb).mu(sb) - c; };
    double lo = ctx.w0(sb), f_lo = sub_far(lo);
    if (f_lo > 0.0) {
        std::ostringstream os;
        os << "radial_barriers: c = " << format_double(c) << " lies below the smallest subsolution far constant "
           << format_double(c + f_lo);
        throw SpliceFailure(os.str());
    }
    double gap = 1.0, hi = lo + gap, f_hi = sub_far(hi);
    for (int k = 0; f_hi < 0.0; ++k) {
        if (k == 60) throw SpliceFailure("radial_barriers: no subsolution reaches the far constant");
        lo = hi;
        f_lo = f_hi;
        gap *= 2.0;
        hi = lo + gap;
        f_hi = sub_far(hi);
    }
    double xi = f_hi == 0.0 ? hi : lo;
    if (f_lo < 0.0 && f_hi > 0.0) {
        xi = brent(sub_far, {lo, hi, f_lo, f_hi}, 1e-14 * std::max(1.0, hi)).x;
        // keep the far constant at or below c
        double step = 1e-14 * std::max(1.0, hi);
        while (xi > lo && sub_far(xi) > 0.0) {
            xi = std::max(lo, xi - step);
            step *= 2.0;
        }
    }
    auto sub = integrate_sub_w(ctx, xi, s_max, options.ode, sb).with_first(phi);

    // super: w = W0 at the shell, shifted up to far constant c
    auto sup = integrate_super_w(ctx, ctx.W0(sb), 0.0, s_max, options.ode, sb);
    const double first = c - sup.mu(sb);
    if (!(first >= phi)) {
        std::ostringstream os;
        os << "radial_barriers: c = " << format_double(c) << " puts the supersolution below phi on the boundary";
        throw SpliceFailure(os.str());
    }
    return RadialBarriers{sb, std::move(sub), sup.with_first(first)};
}

std::pair<double, double> estimate_far_constant(const std::vector<double>& s, const std::vector<double>& u) {
    if (s.size() != u.size() || s.empty()) throw ArgumentError("estimate_far_constant: size mismatch");
    const double cut = 0.8 * *std::max_element(s.begin(), s.end());
    double sum = 0.0, sum2 = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < cut) continue;
        const double d = u[i] - s[i];
        sum += d;
        sum2 += d * d;
        ++count;
    }
    const double mean = sum / static_cast<double>(count);
    const double var = std::max(0.0, sum2 / static_cast<double>(count) - mean * mean);
    return {mean, std::sqrt(var)};
}

namespace {

struct RadialResidual {
    const ImplicitContext& ctx;
    const std::vector<double>& s;
    double h;
    double a;
    std::size_t n;

    /// eigenvalues at node j from the increments d_i = y_{i+1} - y_i of y = u - s
    bool lambdas(const std::vector<double>& d, std::size_t j, std::vector<double>& lam) const {
        const double yt = (d[j] + d[j - 1]) / (2.0 * h);
        const double ytt = (d[j] - d[j - 1]) / (h * h);
        lam[0] = a * (1.0 + (2.0 * ytt - yt) / s[j]);
        for (std::size_t i = 1; i < n; ++i) lam[i] = a * (1.0 + yt / s[j]);
        return ctx.op().admissible(lam);
    }

    /// max residual, or +inf when some node leaves the cone
    double evaluate(const std::vector<double>& d, std::vector<double>& F) const {
        std::vector<double> lam(n);
        double worst = 0.0;
        for (std::size_t j = 1; j < d.size(); ++j) {
            if (!lambdas(d, j, lam)) return std::numeric_limits<double>::infinity();
            F[j] = ctx.op().eval(lam) - ctx.rhs().radial_value(s[j]);
            worst = std::max(worst, std::abs(F[j]));
        }
        return worst;
    }
};

}  // namespace

RadialSolution solve_radial(const ImplicitContext& ctx, double s_boundary, double phi, const RadialFn& lower,
                            const RadialFn& upper, const RadialOptions& options, const RadialFn& initial) {
    if (!ctx.rhs().is_radial()) throw ArgumentError("solve_radial: g must be radial");
    const auto& av = ctx.a();
    if (!std::all_of(av.begin(), av.end(), [&](double v) { return v == av.front(); }))
        throw ArgumentError("solve_radial: A must be a multiple of the identity");
    if (options.nodes < 5) throw ArgumentError("solve_radial: need at least 5 nodes");
    const double s_R = options.s_outer_factor * ctx.rhs().s0();
    if (!(s_R > s_boundary && s_boundary > 0.0)) throw ArgumentError("solve_radial: need 0 < s_b < s_R");

    const std::size_t N = options.nodes;
    const double t0 = std::log(s_boundary), t1 = std::log(s_R);
    const double h = (t1 - t0) / static_cast<double>(N - 1);
    RadialSolution sol;
    sol.s.resize(N);
    for (std::size_t j = 0; j < N; ++j) sol.s[j] = std::exp(t0 + h * static_cast<double>(j));
    sol.s.front() = s_boundary;
    sol.s.back() = s_R;
    const auto& s = sol.s;

    std::vector<double> lo(N), up(N), y(N);
    for (std::size_t j = 0; j < N; ++j) {
        lo[j] = lower(s[j]) - s[j];
        up[j] = upper(s[j]) - s[j];
        y[j] = (initial ? initial(s[j]) : lower(s[j])) - s[j];
    }
    y.front() = phi - s.front();
    y.back() = up.back();

    const std::size_t n = av.size();
    RadialResidual R{ctx, s, h, av.front(), n};
    auto& rep = sol.report;
    rep.mode = "radial";
    rep.unknowns = N - 2;

    // increments carry the state: second differences of O(c) values would
    // otherwise put a roundoff floor of eps |y| / h^2 on the residual
    std::vector<double> d(N - 1), dt(N - 1);
    for (std::size_t j = 0; j + 1 < N; ++j) d[j] = y[j + 1] - y[j];
    std::vector<double> F(N, 0.0), Ft(N, 0.0), yt(N), lam(n);
    std::vector<double> sub(N), diag(N), sup(N), rhs(N), delta(N);
    double res = R.evaluate(d, F);
    if (!std::isfinite(res)) throw ConeViolation("solve_radial: initial profile is not admissible", 0);
    rep.residual_history.push_back(res);
    constexpr double kSandwichSlack = 1e-9;

    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        // tridiagonal Jacobian
        for (std::size_t j = 1; j + 1 < N; ++j) {
            R.lambdas(d, j, lam);
            const auto grad = ctx.op().gradient(lam);
            double rest = 0.0;
            for (std::size_t i = 1; i < n; ++i) rest += grad[i];
            const double k = R.a / s[j];
            sup[j] = k * (grad[0] * (2.0 / (h * h) - 1.0 / (2.0 * h)) + rest / (2.0 * h));
            sub[j] = k * (grad[0] * (2.0 / (h * h) + 1.0 / (2.0 * h)) - rest / (2.0 * h));
            diag[j] = -k * grad[0] * 4.0 / (h * h);
            rhs[j] = -F[j];
        }
        // Thomas with the Dirichlet ends eliminated
        for (std::size_t j = 2; j + 1 < N; ++j) {
            const double m = sub[j] / diag[j - 1];
            diag[j] -= m * sup[j - 1];
            rhs[j] -= m * rhs[j - 1];
        }
        delta[N - 2] = rhs[N - 2] / diag[N - 2];
        for (std::size_t j = N - 3; j >= 1; --j) delta[j] = (rhs[j] - sup[j] * delta[j + 1]) / diag[j];
        delta.front() = delta.back() = 0.0;

        double alpha = 1.0, res_t = res;
        bool accepted = false;
        for (int halving = 0; halving < 40; ++halving) {
            bool inside = true;
            for (std::size_t j = 0; j < N; ++j) {
                yt[j] = y[j] + alpha * delta[j];
                if (yt[j] < lo[j] - kSandwichSlack || yt[j] > up[j] + kSandwichSlack) inside = false;
            }
            if (inside) {
                for (std::size_t j = 0; j + 1 < N; ++j) dt[j] = d[j] + alpha * (delta[j + 1] - delta[j]);
                res_t = R.evaluate(dt, Ft);
                if (res_t < res) {
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
            ++rep.step_halvings;
        }
        rep.iterations = it + 1;
        if (!accepted) break;
        double step = 0.0;
        for (std::size_t j = 0; j < N; ++j) step = std::max(step, std::abs(yt[j] - y[j]));
        y.swap(yt);
        d.swap(dt);
        F.swap(Ft);
        res = res_t;
        rep.last_update = step;
        rep.residual_history.push_back(res);
        if (step <= options.update_tol * (1.0 + std::abs(y.back()))) break;
    }

    rep.residual = res;
    rep.converged = res <= options.residual_tol;
    sol.u.resize(N);
    rep.lower_margin = rep.upper_margin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < N; ++j) {
        sol.u[j] = y[j] + s[j];
        if (j > 0 && j + 1 < N) {
            rep.lower_margin = std::min(rep.lower_margin, y[j] - lo[j]);
            rep.upper_margin = std::min(rep.upper_margin, up[j] - y[j]);
        }
    }
    rep.boundary_error = std::abs(sol.u.front() - phi);
    const auto [mean, sd] = estimate_far_constant(sol.s, sol.u);
    rep.far_constant = mean;
    rep.far_constant_std = sd;
    const double cut = 0.8 * s_R;
    rep.far_nodes = static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [&](double v) { return v >= cut; }));
    return sol;
}

double RadialSolution::at(double s_query) const {
    if (s_query <= s.front()) return u.front();
    if (s_query >= s.back()) return u.back();
    const double t0 = std::log(s.front());
    const double h = (std::log(s.back()) - t0) / static_cast<double>(s.size() - 1);
    const double pos = (std::log(s_query) - t0) / h;
    const std::size_t j = std::min(static_cast<std::size_t>(pos), s.size() - 2);
    const double f = pos - static_cast<double>(j);
    return s_query + (1.0 - f) * (u[j] - s[j]) + f * (u[j + 1] - s[j + 1]);
}

std::string radial_field_csv(const RadialSolution& sol) {
    std::string out = "# mode,radial\n";
    out += "# far_constant," + format_double(sol.report.far_constant) + "\n";
    out += "s,u\n";
    for (std::size_t j = 0; j < sol.s.size(); ++j)
        out += format_double(sol.s[j]) + "," + format_double(sol.u[j]) + "\n";
    return out;
}

}  // namespace hessex
