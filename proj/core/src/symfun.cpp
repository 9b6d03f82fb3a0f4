#include "hessex/symfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "hessex/roots.hpp"

namespace hessex {

LambdaVec::LambdaVec(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw ArgumentError("LambdaVec: need at least two eigenvalues");
    for (double v : values_)
        if (!std::isfinite(v)) throw ArgumentError("LambdaVec: non-finite eigenvalue");
    std::sort(values_.begin(), values_.end());
}

std::vector<double> elementary_symmetric(std::span<const double> lambda, int kmax) {
    const int n = static_cast<int>(lambda.size());
    kmax = std::min(kmax, n);
    std::vector<double> e(static_cast<std::size_t>(std::max(kmax, 0)) + 1, 0.0);
    e[0] = 1.0;
    for (int i = 0; i < n; ++i) {
        const int top = std::min(i + 1, kmax);
        for (int j = top; j >= 1; --j) e[j] += lambda[i] * e[j - 1];
    }
    return e;
}

double sigma_k(std::span<const double> lambda, int k) {
    const int n = static_cast<int>(lambda.size());
    if (k < 1 || k > n) throw ArgumentError("sigma_k: k=" + std::to_string(k) + " outside 1.." + std::to_string(n));
    return elementary_symmetric(lambda, k)[k];
}

double sigma_k_deleted(std::span<const double> lambda, int k, std::size_t skip) {
    if (k < 0) return 0.0;
    if (k == 0) return 1.0;
    std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
    e[0] = 1.0;
    int seen = 0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (i == skip) continue;
        ++seen;
        const int top = std::min(seen, k);
        for (int j = top; j >= 1; --j) e[j] += lambda[i] * e[j - 1];
    }
    return seen >= k ? e[k] : 0.0;
}

ConeSpec ConeSpec::garding(int k, int n) {
    if (n < 2) throw ArgumentError("cone dimension must be >= 2");
    if (k < 1 || k > n) throw ArgumentError("Garding cone order outside 1..n");
    return {Kind::Garding, k, n};
}

ConeSpec ConeSpec::positive_orthant(int n) {
    if (n < 2) throw ArgumentError("cone dimension must be >= 2");
    return {Kind::PositiveOrthant, n, n};
}

ConeMembership cone_contains(const ConeSpec& cone, std::span<const double> lambda) {
    ConeMembership m;
    m.margin = std::numeric_limits<double>::infinity();
    if (cone.kind == ConeSpec::Kind::PositiveOrthant) {
        // ascending storage is not assumed
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            if (lambda[i] < m.margin) m.margin = lambda[i];
            if (!(lambda[i] > 0.0) && m.failing_index == 0) m.failing_index = static_cast<int>(i) + 1;
        }
    } else {
        const auto e = elementary_symmetric(lambda, cone.k);
        for (int j = 1; j <= cone.k; ++j) {
            m.margin = std::min(m.margin, e[j]);
            if (!(e[j] > 0.0) && m.failing_index == 0) m.failing_index = j;
        }
    }
    m.inside = m.failing_index == 0;
    return m;
}

SymmetricOperator SymmetricOperator::hessian_root(int k, int n) {
    SymmetricOperator op;
    op.kind_ = OperatorKind::HessianRoot;
    op.cone_ = ConeSpec::garding(k, n);
    op.n_ = n;
    op.k_ = k;
    return op;
}

SymmetricOperator SymmetricOperator::hessian_quotient_root(int k, int l, int n) {
    if (!(1 <= l && l < k && k <= n)) throw ArgumentError("hessian quotient requires 1 <= l < k <= n");
    SymmetricOperator op;
    op.kind_ = OperatorKind::HessianQuotientRoot;
    op.cone_ = ConeSpec::garding(k, n);
    op.n_ = n;
    op.k_ = k;
    op.l_ = l;
    return op;
}

SymmetricOperator SymmetricOperator::special_lagrangian(double theta, int n) {
    const double floor = (n - 1) * std::numbers::pi / 2.0;
    if (!(theta >= floor * (1.0 - 1e-15)))
        throw ArgumentError("special Lagrangian needs theta >= (n-1)pi/2");
    SymmetricOperator op;
    op.kind_ = OperatorKind::SpecialLagrangian;
    op.cone_ = ConeSpec::positive_orthant(n);
    op.n_ = n;
    op.k_ = n;
    op.theta_ = theta;
    return op;
}

SymmetricOperator SymmetricOperator::custom(int n, ConeSpec cone, CustomFunctions fns) {
    if (!fns.value || !fns.gradient) throw ArgumentError("custom operator needs value and gradient");
    if (cone.n != n) throw ArgumentError("custom operator cone dimension mismatch");
    SymmetricOperator op;
    op.kind_ = OperatorKind::Custom;
    op.cone_ = cone;
    op.n_ = n;
    op.custom_ = std::make_shared<const CustomFunctions>(std::move(fns));
    return op;
}

std::string SymmetricOperator::describe() const {
    std::ostringstream os;
    switch (kind_) {
    case OperatorKind::HessianRoot: os << "hessian_root(k=" << k_ << ", n=" << n_ << ")"; break;
    case OperatorKind::HessianQuotientRoot:
        os << "hessian_quotient_root(k=" << k_ << ", l=" << l_ << ", n=" << n_ << ")";
        break;
    case OperatorKind::SpecialLagrangian: os << "special_lagrangian(theta=" << theta_ << ", n=" << n_ << ")"; break;
    case OperatorKind::Custom: os << custom_->name << "(n=" << n_ << ")"; break;
    }
    return os.str();
}

void SymmetricOperator::require(std::span<const double> lambda) const {
    if (static_cast<int>(lambda.size()) != n_)
        throw ArgumentError("operator dimension " + std::to_string(n_) + " but got " +
                            std::to_string(lambda.size()) + " eigenvalues");
    const auto m = cone_contains(cone_, lambda);
    if (!m.inside)
        throw ConeViolation("eigenvalues outside the admissible cone (defining quantity " +
                                std::to_string(m.failing_index) + " not positive)",
                            m.failing_index);
}

double SymmetricOperator::eval(std::span<const double> lambda) const {
    require(lambda);
    switch (kind_) {
    case OperatorKind::HessianRoot: {
        const double s = sigma_k(lambda, k_);
        return k_ == 1 ? s : std::pow(s, 1.0 / k_);
    }
    case OperatorKind::HessianQuotientRoot: {
        const auto e = elementary_symmetric(lambda, k_);
        const double q = e[k_] / e[l_];
        return k_ - l_ == 1 ? q : std::pow(q, 1.0 / (k_ - l_));
    }
    case OperatorKind::SpecialLagrangian: {
        double s = 0.0;
        for (double v : lambda) s += std::atan(v);
        return s / theta_;
    }
    case OperatorKind::Custom: return custom_->value(lambda);
    }
    return 0.0;
}

std::vector<double> SymmetricOperator::gradient(std::span<const double> lambda) const {
    require(lambda);
    const std::size_t n = lambda.size();
    std::vector<double> g(n);
    switch (kind_) {
    case OperatorKind::HessianRoot: {
        const double s = sigma_k(lambda, k_);
        const double scale = (1.0 / k_) * std::pow(s, 1.0 / k_ - 1.0);
        for (std::size_t i = 0; i < n; ++i) g[i] = scale * sigma_k_deleted(lambda, k_ - 1, i);
        break;
    }
    case OperatorKind::HessianQuotientRoot: {
        const auto e = elementary_symmetric(lambda, k_);
        const double sk = e[k_], sl = e[l_];
        const double p = 1.0 / (k_ - l_);
        const double q = sk / sl;
        const double scale = p * std::pow(q, p - 1.0) / (sl * sl);
        for (std::size_t i = 0; i < n; ++i) {
            const double dq = sigma_k_deleted(lambda, k_ - 1, i) * sl - sk * sigma_k_deleted(lambda, l_ - 1, i);
            g[i] = scale * dq;
        }
        break;
    }
    case OperatorKind::SpecialLagrangian:
        for (std::size_t i = 0; i < n; ++i) g[i] = 1.0 / (theta_ * (1.0 + lambda[i] * lambda[i]));
        break;
    case OperatorKind::Custom:
        g = custom_->gradient(lambda);
        if (g.size() != n) throw ArgumentError("custom gradient returned wrong length");
        break;
    }
    return g;
}

double SymmetricOperator::partial(std::span<const double> lambda, std::size_t i) const {
    switch (kind_) {
    case OperatorKind::HessianRoot: {
        require(lambda);
        const double s = sigma_k(lambda, k_);
        return (1.0 / k_) * std::pow(s, 1.0 / k_ - 1.0) * sigma_k_deleted(lambda, k_ - 1, i);
    }
    case OperatorKind::SpecialLagrangian:
        require(lambda);
        return 1.0 / (theta_ * (1.0 + lambda[i] * lambda[i]));
    default: return gradient(lambda)[i];
    }
}

double solve_on_ray(const SymmetricOperator& op, std::span<const double> direction, double target) {
    if (!op.admissible(direction)) throw ArgumentError("solve_on_ray: direction outside the cone");
    std::vector<double> point(direction.begin(), direction.end());
    auto at = [&](double t) -> std::span<const double> {
        for (std::size_t i = 0; i < point.size(); ++i) point[i] = t * direction[i];
        return point;
    };
    auto residual = [&](double t) { return op.eval(at(t)) - target; };
    auto slope = [&](double t) {
        const auto g = op.gradient(at(t));
        double d = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) d += g[i] * direction[i];
        return d;
    };

    const double r1 = residual(1.0);
    if (r1 == 0.0) return 1.0;
    constexpr int budget = 128;
    RootBracket b{1.0, 1.0, r1, r1};
    if (r1 < 0.0) {
        int j = 0;
        while (b.f_hi < 0.0) {
            if (++j > budget)
                throw NormalizationError("no t with f(t*direction) >= " + std::to_string(target) + " up to 2^128");
            b.lo = b.hi;
            b.f_lo = b.f_hi;
            b.hi *= 2.0;
            b.f_hi = residual(b.hi);
        }
    } else {
        int j = 0;
        while (b.f_lo > 0.0) {
            if (++j > budget)
                throw NormalizationError("no t with f(t*direction) <= " + std::to_string(target) + " down to 2^-128");
            b.hi = b.lo;
            b.f_hi = b.f_lo;
            b.lo *= 0.5;
            b.f_lo = residual(b.lo);
        }
    }
    return solve_bracketed(residual, slope, b).x;
}

double solve_a_star(const SymmetricOperator& op) {
    const std::vector<double> ones(static_cast<std::size_t>(op.dimension()), 1.0);
    return solve_on_ray(op, ones, 1.0);
}

namespace {

void require_diag(const SymmetricOperator& op, std::span<const double> a) {
    if (static_cast<int>(a.size()) != op.dimension()) throw ArgumentError("A has wrong dimension");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] > 0.0) || !std::isfinite(a[i])) throw ArgumentError("A must be positive definite");
        if (i > 0 && a[i] < a[i - 1]) throw ArgumentError("diagonal entries of A must be ascending");
    }
}

}  // namespace

double alpha_of(const SymmetricOperator& op, std::span<const double> a) {
    require_diag(op, a);
    const auto g = op.gradient(a);
    if (!(g.front() > 0.0)) throw StructuralError("monotonicity", "d_1 f(lambda(A)) <= 0");
    double num = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) num += a[i] * g[i];
    return num / (2.0 * a.back() * g.front());
}

AValidation validate_A(const SymmetricOperator& op, std::span<const double> a) {
    require_diag(op, a);
    AValidation v;
    if (!op.admissible(a)) return v;
    v.f_value = op.eval(a);
    v.in_calA = std::abs(v.f_value - 1.0) <= 1e-10;
    if (v.in_calA) {
        v.alpha = alpha_of(op, a);
        v.in_scriptA = v.alpha > 1.0 + 1e-12;
    }
    return v;
}

std::vector<double> normalize_onto_level(const SymmetricOperator& op, std::span<const double> a) {
    require_diag(op, a);
    const double t = solve_on_ray(op, a, 1.0);
    std::vector<double> out(a.begin(), a.end());
    for (double& v : out) v *= t;
    return out;
}

// ---------------------------------------------------------------------------
// structure checks

namespace {

using Rng = std::mt19937_64;

std::vector<std::vector<double>> sample_cone(const SymmetricOperator& op, Rng& rng, std::size_t count) {
    const int n = op.dimension();
    std::uniform_real_distribution<double> entry(-1.0, 3.0);
    std::uniform_real_distribution<double> pos(0.02, 3.0);
    std::uniform_real_distribution<double> lscale(-1.0, 1.0);
    std::vector<std::vector<double>> out;
    out.reserve(count);
    std::size_t draws = 0;
    while (out.size() < count && draws < 200 * count) {
        ++draws;
        std::vector<double> v(n);
        const bool orthant = op.cone().kind == ConeSpec::Kind::PositiveOrthant || (draws % 3 == 0);
        const double scale = std::pow(10.0, lscale(rng));
        for (auto& x : v) x = scale * (orthant ? pos(rng) : entry(rng));
        const auto m = cone_contains(op.cone(), v);
        if (m.inside && m.margin > 1e-6) out.push_back(std::move(v));
    }
    return out;
}

std::vector<double> toward_boundary(const SymmetricOperator& op, const std::vector<double>& lam, double margin) {
    // slide the smallest coordinate down; every defining quantity is affine and decreasing in it
    const auto imin = static_cast<std::size_t>(std::min_element(lam.begin(), lam.end()) - lam.begin());
    auto moved = [&](double t) {
        auto v = lam;
        v[imin] -= t;
        return v;
    };
    double lo = 0.0, hi = 1.0;
    while (cone_contains(op.cone(), moved(hi)).inside) hi *= 2.0;
    // find t with 0 < cone margin <= margin
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto m = cone_contains(op.cone(), moved(mid));
        if (m.inside && m.margin <= margin) return moved(mid);
        if (m.inside) lo = mid; else hi = mid;
    }
    return moved(lo);
}

}  // namespace

StructureReport check_structure(const SymmetricOperator& op, std::uint64_t seed, GBounds g_bounds,
                                std::size_t sample_count) {
    if (sample_count < 100) sample_count = 100;
    StructureReport rep;
    rep.seed = seed;
    rep.inf_g = g_bounds.inf_g;
    rep.sup_g = g_bounds.sup_g;
    Rng rng(seed);
    const int n = op.dimension();
    const auto pts = sample_cone(op, rng, sample_count);
    rep.cone_samples = pts.size();

    // monotonicity
    {
        auto& c = rep.monotone;
        c.worst_margin = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) {
            const auto g = op.gradient(p);
            const double gmin = *std::min_element(g.begin(), g.end());
            c.worst_margin = std::min(c.worst_margin, gmin);
            if (!(gmin > 0.0)) ++c.failures;
            ++c.samples;
        }
        c.pass = c.failures == 0;
        c.note = "min_i df/dlambda_i over the cone sample";
    }

    // boundary behaviour: f well below inf g near the cone boundary
    {
        auto& c = rep.boundary_condition;
        c.worst_margin = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) {
            const auto q = toward_boundary(op, p, 1e-3);
            double fq = 0.0;
            try {
                fq = op.eval(q);
            } catch (const ConeViolation&) {
                continue;
            }
            const double gap = g_bounds.inf_g - fq;
            c.worst_margin = std::min(c.worst_margin, gap);
            if (!(gap > 0.0)) ++c.failures;
            ++c.samples;
        }
        c.pass = c.failures == 0;
        c.note = "sampled at cone margin <= 1e-3; a sampled check, not a proof";
    }

    // nu condition
    {
        auto& c = rep.nu_condition;
        c.worst_margin = std::numeric_limits<double>::infinity();
        if (op.homogeneous()) {
            for (const auto& p : pts) {
                const auto g = op.gradient(p);
                const double f = op.eval(p);
                double euler = 0.0;
                for (int i = 0; i < n; ++i) euler += p[i] * g[i];
                const double err = std::abs(euler - f) / std::max(1.0, std::abs(f));
                c.worst_margin = std::min(c.worst_margin, 1e-10 - err);
                if (!(err <= 1e-10 && f > 0.0)) ++c.failures;
                ++c.samples;
            }
            rep.nu_description = "nu(t) = t (Euler identity of a degree-one homogeneous operator)";
            c.note = "checked as sum lambda_i df/dlambda_i == f";
        } else {
            // a positive increasing nu forces sum lambda_i d_i f to stay bounded below along every
            // ray t*lambda, t >= 1, since f(t*lambda) is nondecreasing in t
            constexpr double eps = 1e-8;
            for (const auto& p : pts) {
                for (int e = 0; e <= 12; e += 2) {
                    std::vector<double> q = p;
                    for (auto& v : q) v *= std::pow(10.0, e);
                    const auto g = op.gradient(q);
                    const double f = op.eval(q);
                    double euler = 0.0;
                    for (int i = 0; i < n; ++i) euler += q[i] * g[i];
                    const double gap = euler - eps * std::max(f, eps);
                    c.worst_margin = std::min(c.worst_margin, gap);
                    if (!(gap >= 0.0)) ++c.failures;
                    ++c.samples;
                }
            }
            rep.nu_heuristic = true;
            rep.nu_description = "sampled surrogate: sum lambda_i d_i f >= 1e-8 max(f, 1e-8) along rays up to 1e12";
            c.note = "heuristic; rays scaled by 10^0..10^12";
        }
        c.pass = c.failures == 0;
    }

    // max partial at the smallest eigenvalue
    {
        auto& c = rep.max_partial;
        c.worst_margin = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) {
            std::vector<double> sorted = p;
            std::sort(sorted.begin(), sorted.end());
            if (!(sorted[1] - sorted[0] > 1e-9 * std::max(1.0, std::abs(sorted[0])))) continue;
            const auto imin = static_cast<std::size_t>(std::min_element(p.begin(), p.end()) - p.begin());
            const auto g = op.gradient(p);
            const double gmax = *std::max_element(g.begin(), g.end());
            const double gap = g[imin] - gmax;
            c.worst_margin = std::min(c.worst_margin, gap);
            if (gap < -1e-12 * std::abs(gmax)) ++c.failures;
            ++c.samples;
        }
        c.pass = c.failures == 0;
        c.note = "argmax of the gradient must sit at the smallest eigenvalue";
    }

    // R-shift on the positive orthant, entries log-uniform in [1e-3, 10]
    {
        auto& c = rep.r_shift;
        std::uniform_real_distribution<double> le(-3.0, 1.0);
        c.worst_margin = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < sample_count; ++s) {
            std::vector<double> p(n);
            for (auto& v : p) v = std::pow(10.0, le(rng));
            std::sort(p.begin(), p.end());
            double witness = -1.0;
            double best = -std::numeric_limits<double>::infinity();
            for (int j = 0; j <= 40; ++j) {
                const double R = std::ldexp(1.0, j);
                auto q = p;
                q.back() += R;
                const double f = op.eval(q);
                best = std::max(best, f);
                if (f >= 1.0) {
                    witness = R;
                    break;
                }
            }
            rep.r_shift_witnesses.push_back(witness);
            c.worst_margin = std::min(c.worst_margin, best - 1.0);
            if (witness < 0.0) ++c.failures;
            ++c.samples;
        }
        c.pass = c.failures == 0;
        c.note = c.pass ? "witness R found for every sample by doubling up to 2^40"
                        : "no R up to 2^40 for " + std::to_string(c.failures) + " samples";
    }

    // concavity (informational)
    {
        auto& c = rep.concavity_sampled;
        c.worst_margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
            std::vector<double> mid(n);
            for (int j = 0; j < n; ++j) mid[j] = 0.5 * (pts[i][j] + pts[i + 1][j]);
            const double gap = op.eval(mid) - 0.5 * (op.eval(pts[i]) + op.eval(pts[i + 1]));
            const double scale = std::max(1.0, std::abs(op.eval(mid)));
            c.worst_margin = std::min(c.worst_margin, gap);
            if (gap < -1e-12 * scale) ++c.failures;
            ++c.samples;
        }
        c.pass = c.failures == 0;
        c.note = "midpoint secant test on sampled pairs; informational only";
    }
    return rep;
}

}  // namespace hessex
