#include "hessex/barriers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "hessex/errors.hpp"
#include "hessex/format.hpp"
#include "hessex/linalg.hpp"
#include "hessex/parallel.hpp"
#include "hessex/sampling.hpp"

namespace hessex {

namespace {

double quad_form(std::span<const double> a, std::span<const double> x) {
    double q = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) q += a[i] * x[i] * x[i];
    return q;
}

double norm(std::span<const double> x) {
    double q = 0.0;
    for (double v : x) q += v * v;
    return std::sqrt(q);
}

}  // namespace

// ---------------------------------------------------------------------------
// boundary barriers

double BoundaryBarrier::value(std::span<const double> x, std::span<const double> a, double K) const {
    double quad = 0.0, lin = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = x[i] - xi[i];
        quad += a[i] * d * d;
        lin += slope[i] * d;
    }
    return phi_xi + 0.5 * K * quad + lin;
}

double BoundaryBarrierSet::value(std::span<const double> x) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& b : barriers) best = std::max(best, b.value(x, a, K));
    return best;
}

BoundaryBarrier boundary_barrier(const std::vector<BoundaryPoint>& mesh, std::size_t index,
                                 const std::vector<double>& a, double K, double neighbourhood) {
    constexpr double kMargin = 1e-10;
    constexpr double kTFirst = 1.0 / 64.0, kTBudget = 1073741824.0;  // 2^30
    const std::size_t n = a.size();
    const BoundaryPoint& p = mesh.at(index);
    BoundaryBarrier b;
    b.xi = p.x;
    b.phi_xi = p.phi;
    b.xbar.resize(n);
    b.slope.resize(n);
    for (double t = kTFirst; t <= kTBudget; t *= 2.0) {
        for (std::size_t i = 0; i < n; ++i) {
            b.slope[i] = p.tangential_gradient[i] + t * K * p.normal[i];
            b.xbar[i] = p.x[i] - b.slope[i] / (K * a[i]);
        }
        b.t = t;
        double margin = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (std::size_t j = 0; j < mesh.size() && ok; ++j) {
            if (j == index) continue;
            const double gap = mesh[j].phi - b.value(mesh[j].x, a, K);
            double dist2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) dist2 += (mesh[j].x[i] - p.x[i]) * (mesh[j].x[i] - p.x[i]);
            const double need = dist2 > neighbourhood * neighbourhood ? kMargin : 0.0;
            if (!(gap > need)) ok = false;
            margin = std::min(margin, gap);
        }
        if (ok) {
            b.margin = margin;
            return b;
        }
    }
    std::ostringstream os;
    os << "boundary barrier at mesh point " << index << " not found with t <= 2^30";
    throw BarrierFailure(os.str());
}

BoundaryBarrierSet build_boundary_barriers(const DomainSpec& domain, const std::vector<double>& a, double K,
                                           std::size_t mesh_points) {
    if (domain.dimension() != a.size()) throw ArgumentError("boundary barriers: dimension mismatch");
    const auto mesh = domain.boundary_mesh(mesh_points);
    BoundaryBarrierSet set;
    set.K = K;
    set.a = a;
    set.mesh_spacing = domain.mesh_spacing(mesh_points);
    set.barriers.resize(mesh.size());
    const double nb = 2.5 * set.mesh_spacing;
    parallel_for(mesh.size(), [&](std::size_t i) { set.barriers[i] = boundary_barrier(mesh, i, a, K, nb); }, 16);
    set.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& b : set.barriers) {
        set.xbar_bound = std::max(set.xbar_bound, norm(b.xbar));
        set.min_margin = std::min(set.min_margin, b.margin);
    }
    return set;
}

// ---------------------------------------------------------------------------
// subsolution

Subsolution::Subsolution(const BarrierSetup& setup, BarrierProfile profile)
    : barriers_(setup.barriers), a_(setup.a), s1_(setup.s1), s2_(setup.s2), profile_(std::move(profile)) {}

Subsolution::Eval Subsolution::eval(std::span<const double> x) const {
    const double s = 0.5 * quad_form(a_, x);
    if (s <= s1_) return {barriers_->value(x), Piece::Barrier};
    if (s > s2_) return {profile_.u(s), Piece::Profile};
    const double wb = barriers_->value(x), up = profile_.u(s);
    return wb > up ? Eval{wb, Piece::Barrier} : Eval{up, Piece::Profile};
}

std::vector<double> Subsolution::active_eigenvalues(std::span<const double> x) const {
    if (eval(x).piece == Piece::Barrier) {
        std::vector<double> lam(a_);
        for (auto& v : lam) v *= barriers_->K;
        return lam;
    }
    const double s = 0.5 * quad_form(a_, x);
    return eigenvalues_ascending(hessian_generalized(a_, x, profile_.w(s), profile_.dw(s)));
}

// ---------------------------------------------------------------------------
// supersolution

Supersolution::Supersolution(const BarrierSetup& setup, double c) : a_(setup.a), c_(c) {}

Supersolution::Supersolution(const BarrierSetup& setup, BarrierProfile super, BarrierProfile radial)
    : a_(setup.a), a_tilde_(setup.a_tilde), r1_(setup.r1), r2_(setup.r2), super_(std::move(super)),
      radial_(std::move(radial)) {}

Supersolution::Eval Supersolution::eval(std::span<const double> x) const {
    const double s = 0.5 * quad_form(a_, x);
    if (!super_) return {s + c_, Piece::Quadratic};
    const double r = norm(x);
    if (r > r2_) return {super_->u(s), Piece::Profile};
    const double v = radial_->u(0.5 * a_tilde_ * r * r);
    if (r < r1_) return {v, Piece::Radial};
    const double U = super_->u(s);
    return v < U ? Eval{v, Piece::Radial} : Eval{U, Piece::Profile};
}

std::vector<double> Supersolution::active_eigenvalues(std::span<const double> x) const {
    const auto piece = eval(x).piece;
    if (piece == Piece::Quadratic) return a_;
    if (piece == Piece::Profile) {
        const double s = 0.5 * quad_form(a_, x);
        return eigenvalues_ascending(hessian_generalized(a_, x, super_->w(s), super_->dw(s)));
    }
    const double r = norm(x);
    const double st = 0.5 * a_tilde_ * r * r;
    // v = V(a~ |x|^2 / 2): eigenvalues a~ V' (n - 1 times) and a~ V' + 2 a~ s~ V''
    const double v1 = radial_->w(st), v2 = radial_->dw(st);
    std::vector<double> lam(a_.size(), a_tilde_ * v1);
    lam.front() = a_tilde_ * v1 + 2.0 * a_tilde_ * st * v2;
    std::sort(lam.begin(), lam.end());
    return lam;
}

// ---------------------------------------------------------------------------
// verification

std::vector<std::vector<double>> exterior_samples(const DomainSpec& domain, const std::vector<double>& a,
                                                  double radius_outer, std::size_t count) {
    static constexpr std::array<unsigned, 12> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    const std::size_t n = a.size();
    if (n >= kPrimes.size()) throw ArgumentError("exterior_samples: dimension too large");
    const auto dirs = sphere_points(n, count);
    std::vector<std::vector<double>> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        const double rin = domain.exit_radius(dirs[i]);
        if (!(radius_outer > rin)) continue;
        // keep strictly outside D
        const double lo = rin * (1.0 + 1e-9);
        const double frac = radical_inverse(i + 1, kPrimes[n]);
        const double r = lo * std::pow(radius_outer / lo, frac);
        std::vector<double> x(dirs[i]);
        for (auto& v : x) v *= r;
        pts.push_back(std::move(x));
    }
    return pts;
}

namespace {

struct PointCheck {
    bool checked = false;
    bool cone_failure = false;
    double margin = std::numeric_limits<double>::infinity();
};

InequalityCheck reduce(const std::vector<PointCheck>& r, const std::vector<std::vector<double>>& points,
                       double tolerance, bool cone_failure_fails) {
    InequalityCheck out;
    out.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!r[i].checked) continue;
        ++out.samples;
        if (r[i].cone_failure) {
            ++out.cone_failures;
            if (cone_failure_fails) ++out.failures;
            continue;
        }
        if (r[i].margin < -tolerance) ++out.failures;
        if (r[i].margin < out.worst_margin) {
            out.worst_margin = r[i].margin;
            out.worst_point = points[i];
        }
    }
    return out;
}

}  // namespace

InequalityCheck verify_subsolution(const ImplicitContext& ctx, const Subsolution& sub,
                                   const std::vector<std::vector<double>>& points, double tolerance) {
    std::vector<PointCheck> r(points.size());
    const auto& a = ctx.a();
    parallel_for(points.size(), [&](std::size_t i) {
        const auto& x = points[i];
        const auto lam = sub.active_eigenvalues(x);
        PointCheck pc;
        pc.checked = true;
        if (!ctx.op().admissible(lam)) {
            pc.cone_failure = true;
        } else {
            const double s = 0.5 * quad_form(a, x);
            pc.margin = ctx.op().eval(lam) - ctx.rhs().evaluate(x, s);
        }
        r[i] = pc;
    });
    return reduce(r, points, tolerance, true);
}

InequalityCheck verify_supersolution(const ImplicitContext& ctx, const Supersolution& super,
                                     const std::vector<std::vector<double>>& points, double s_hat,
                                     double tolerance) {
    std::vector<PointCheck> r(points.size());
    const auto& a = ctx.a();
    parallel_for(points.size(), [&](std::size_t i) {
        const auto& x = points[i];
        const double s = 0.5 * quad_form(a, x);
        PointCheck pc;
        if (super.eval(x).piece == Supersolution::Piece::Profile && !(s > s_hat)) {
            r[i] = pc;
            return;
        }
        pc.checked = true;
        const auto lam = super.active_eigenvalues(x);
        // a non-admissible Hessian cannot violate the supersolution inequality
        if (!ctx.op().admissible(lam)) pc.cone_failure = true;
        else pc.margin = ctx.rhs().evaluate(x, s) - ctx.op().eval(lam);
        r[i] = pc;
    });
    return reduce(r, points, tolerance, false);
}

std::string profile_csv(const BarrierProfile& p) {
    std::string out;
    auto line = [&](const std::string& k, double v) { out += "# " + k + "=" + format_double(v) + "\n"; };
    out += "# kind=" + p.kind_name() + "\n";
    line("first", p.first());
    line("second", p.second());
    if (p.kind() == BarrierProfile::Kind::Super) line("delta", p.delta());
    line("s_start", p.s_start());
    line("s_max", p.s_max());
    line("tail_p1", p.tail().p1);
    line("tail_p2", p.tail().p2);
    out += "s,w,u,w_minus_1\n";
    const auto& s = p.nodes();
    const auto& y = p.node_wm1();
    for (std::size_t i = 0; i < s.size(); ++i)
        out += format_double(s[i]) + "," + format_double(1.0 + y[i]) + "," + format_double(p.u(s[i])) + "," +
               format_double(y[i]) + "\n";
    return out;
}

}  // namespace hessex
