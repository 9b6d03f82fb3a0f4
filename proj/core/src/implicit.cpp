#include "hessex/implicit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "hessex/errors.hpp"
#include "hessex/roots.hpp"

namespace hessex {

// ---------------------------------------------------------------------------
// RightHandSide

RightHandSide RightHandSide::constant(double s0) {
    RightHandSide r;
    r.form_ = Form::Constant;
    r.s0_ = s0;
    r.finish();
    return r;
}

RightHandSide RightHandSide::radial(double c0, double beta, double s0, double amplitude) {
    RightHandSide r;
    r.form_ = Form::Radial;
    r.c0_ = c0;
    r.beta_ = beta;
    r.s0_ = s0;
    r.amplitude_ = amplitude;
    r.finish();
    return r;
}

RightHandSide RightHandSide::oscillatory(double c0, double beta, double s0, double amplitude, double omega) {
    RightHandSide r;
    r.form_ = Form::Oscillatory;
    r.c0_ = c0;
    r.beta_ = beta;
    r.s0_ = s0;
    r.amplitude_ = amplitude;
    r.omega_ = omega;
    r.finish();
    return r;
}

RightHandSide RightHandSide::tabulated(double c0, double beta, double s0, std::vector<double> s_nodes,
                                       std::vector<double> g_nodes) {
    if (s_nodes.size() != g_nodes.size() || s_nodes.size() < 2)
        throw ArgumentError("tabulated g needs at least two (s, g) nodes of equal count");
    for (std::size_t i = 1; i < s_nodes.size(); ++i)
        if (!(s_nodes[i] > s_nodes[i - 1])) throw ArgumentError("tabulated g: s nodes must increase");
    RightHandSide r;
    r.form_ = Form::Tabulated;
    r.c0_ = c0;
    r.beta_ = beta;
    r.s0_ = s0;
    r.s_nodes_ = std::move(s_nodes);
    r.g_nodes_ = std::move(g_nodes);
    r.finish();
    return r;
}

void RightHandSide::finish() {
    if (!(s0_ > 1.0)) throw ArgumentError("rhs: s0 must exceed 1");
    if (!(c0_ >= 0.0)) throw ArgumentError("rhs: C0 must be nonnegative");
    if (form_ != Form::Constant && !(beta_ > 2.0)) throw ArgumentError("rhs: beta must exceed 2");
    if (!(std::abs(amplitude_) <= 1.0)) throw ArgumentError("rhs: |amplitude| must not exceed 1");
    const double env = c0_ * std::pow(s0_, -beta_ / 2.0);
    switch (form_) {
    case Form::Constant: inf_g_ = sup_g_ = 1.0; break;
    case Form::Radial:
        inf_g_ = std::min(1.0, 1.0 + env * amplitude_);
        sup_g_ = std::max(1.0, 1.0 + env * amplitude_);
        break;
    case Form::Oscillatory:
        inf_g_ = 1.0 - env * std::abs(amplitude_);
        sup_g_ = 1.0 + env * std::abs(amplitude_);
        break;
    case Form::Tabulated:
        inf_g_ = std::min(1.0, *std::min_element(g_nodes_.begin(), g_nodes_.end()));
        sup_g_ = std::max(1.0, *std::max_element(g_nodes_.begin(), g_nodes_.end()));
        break;
    }
    if (!(g_lower(s0_) > 0.0)) throw ArgumentError("rhs: 1 - C0 s0^{-beta/2} must be positive");
    if (!(inf_g_ > 0.0)) throw ArgumentError("rhs: inf g must be positive");
}

double RightHandSide::radial_value(double s) const {
    const double S = std::max(s, s0_);
    switch (form_) {
    case Form::Constant: return 1.0;
    case Form::Radial: return 1.0 + c0_ * amplitude_ * std::pow(S, -beta_ / 2.0);
    case Form::Tabulated: {
        if (s <= s_nodes_.front()) return g_nodes_.front();
        if (s >= s_nodes_.back())
            return 1.0 + (g_nodes_.back() - 1.0) * std::pow(s_nodes_.back() / s, beta_ / 2.0);
        const auto it = std::upper_bound(s_nodes_.begin(), s_nodes_.end(), s);
        const std::size_t j = static_cast<std::size_t>(it - s_nodes_.begin());
        const double t = (s - s_nodes_[j - 1]) / (s_nodes_[j] - s_nodes_[j - 1]);
        return (1.0 - t) * g_nodes_[j - 1] + t * g_nodes_[j];
    }
    case Form::Oscillatory: break;
    }
    throw ArgumentError("rhs: oscillatory g is not radial");
}

double RightHandSide::evaluate(std::span<const double> x, double s) const {
    if (form_ != Form::Oscillatory) return radial_value(s);
    double sum = 0.0;
    for (double v : x) sum += v;
    return 1.0 + c0_ * amplitude_ * std::cos(omega_ * sum) * std::pow(std::max(s, s0_), -beta_ / 2.0);
}

double RightHandSide::g_upper(double s) const { return 1.0 + c0_ * std::pow(std::max(s, s0_), -beta_ / 2.0); }

double RightHandSide::g_lower(double s) const { return 1.0 - c0_ * std::pow(std::max(s, s0_), -beta_ / 2.0); }

void RightHandSide::validate(std::span<const double> a, std::uint64_t seed, std::size_t samples) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> logs(std::log(s0_), std::log(s0_ * 1e4));
    const std::size_t n = a.size();
    std::vector<double> x(n);
    double worst = 0.0;
    double worst_s = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const double s = std::exp(logs(rng));
        double q = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = normal(rng);
            q += a[i] * x[i] * x[i];
        }
        const double scale = std::sqrt(2.0 * s / q);
        for (auto& v : x) v *= scale;
        const double g = evaluate(x, s);
        const double slack = 1e-14 * std::max(1.0, std::abs(g));
        const double excess = std::max(g - g_upper(s), g_lower(s) - g);
        if (excess > slack && excess > worst) {
            worst = excess;
            worst_s = s;
        }
        if (!(g >= inf_g_ - slack && g <= sup_g_ + slack)) {
            worst = std::max(worst, std::max(inf_g_ - g, g - sup_g_));
            worst_s = s;
        }
    }
    if (worst > 0.0) {
        std::ostringstream os;
        os << "rhs violates its decay envelope by " << worst << " near s = " << worst_s;
        throw ArgumentError(os.str());
    }
}

// ---------------------------------------------------------------------------
// first-coordinate solves

double cone_exit_first_coordinate(const ConeSpec& cone, std::span<const double> rest) {
    if (cone.kind == ConeSpec::Kind::PositiveOrthant) {
        for (double v : rest)
            if (!(v > 0.0)) throw StructuralError("cone", "remaining coordinates leave the positive orthant");
        return 0.0;
    }
    // sigma_j(x, rest) = sigma_j(rest) + x sigma_{j-1}(rest) is affine in x
    std::vector<double> e(static_cast<std::size_t>(cone.k) + 1, 0.0);
    const auto er = elementary_symmetric(rest, cone.k);
    std::copy(er.begin(), er.end(), e.begin());
    double exit = -std::numeric_limits<double>::infinity();
    for (int j = 1; j <= cone.k; ++j) {
        if (!(e[j - 1] > 0.0))
            throw StructuralError("cone", "no first coordinate puts the point in the cone (sigma_" +
                                              std::to_string(j - 1) + " of the rest is not positive)");
        exit = std::max(exit, -e[j] / e[j - 1]);
    }
    return exit;
}

double solve_first_coordinate(const SymmetricOperator& op, std::span<const double> rest, double target,
                              double hint) {
    const std::size_t n = rest.size() + 1;
    if (static_cast<int>(n) != op.dimension()) throw ArgumentError("solve_first_coordinate: dimension mismatch");
    std::vector<double> p(n);
    std::copy(rest.begin(), rest.end(), p.begin() + 1);
    const double exit = cone_exit_first_coordinate(op.cone(), rest);
    auto inside = [&](double x) {
        p[0] = x;
        return op.admissible(p);
    };
    auto residual = [&](double x) {
        p[0] = x;
        return op.eval(p) - target;
    };
    auto slope = [&](double x) {
        p[0] = x;
        return op.partial(p, 0);
    };

    double hi = hint;
    if (!(hi > exit) || !inside(hi)) hi = exit + std::max(1.0, std::abs(exit));
    double f_hi = residual(hi);
    if (f_hi == 0.0) return hi;
    double gap = hi - exit;
    for (int j = 0; f_hi < 0.0; ++j) {
        if (j == 40) {
            std::ostringstream os;
            os << "f(x, rest) stays below " << target << " for x up to " << hi;
            throw StructuralError("r_shift", os.str());
        }
        gap *= 2.0;
        hi = exit + gap;
        f_hi = residual(hi);
    }

    const double unit = std::max(1.0, std::abs(exit));
    double margin = std::min(1e-8 * unit, 0.5 * (hi - exit));
    double lo = exit + margin;
    while (!inside(lo)) {
        margin *= 2.0;
        lo = exit + margin;
        if (!(lo < hi)) throw StructuralError("cone", "cannot place a bracket end inside the cone");
    }
    double f_lo = residual(lo);
    while (f_lo > 0.0) {
        const double next = 0.01 * margin;
        if (!(next > 8.0 * std::numeric_limits<double>::epsilon() * unit) || !inside(exit + next)) {
            std::ostringstream os;
            os << "f stays above " << target << " down to distance " << margin << " from the cone boundary";
            throw StructuralError("boundary_condition", os.str());
        }
        margin = next;
        lo = exit + margin;
        f_lo = residual(lo);
    }
    if (f_lo == 0.0) return lo;
    return solve_bracketed(residual, slope, RootBracket{lo, hi, f_lo, f_hi}).x;
}

// ---------------------------------------------------------------------------
// ImplicitContext

std::size_t ImplicitContext::KeyHash::operator()(const Key& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.tag) * 0x9e3779b97f4a7c15ULL;
    h ^= k.s + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= k.w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
}

ImplicitContext::ImplicitContext(SymmetricOperator op, std::vector<double> a, RightHandSide rhs)
    : op_(std::move(op)), a_(std::move(a)), rhs_(std::move(rhs)), cache_(std::make_shared<Cache>()) {
    if (static_cast<int>(a_.size()) != op_.dimension()) throw ArgumentError("A has wrong dimension");
    for (std::size_t i = 0; i < a_.size(); ++i) {
        if (!(a_[i] > 0.0)) throw ArgumentError("A must be positive definite");
        if (i > 0 && a_[i] < a_[i - 1]) throw ArgumentError("diagonal entries of A must be ascending");
    }
    const double fa = op_.eval(a_);
    if (!(std::abs(fa - 1.0) <= 1e-10)) {
        std::ostringstream os;
        os << "f(lambda(A)) = " << fa << ", expected 1";
        throw NormalizationError(os.str());
    }
    const double ig = rhs_.inf_g();
    if (ig == 1.0)
        a_tilde_ = solve_a_star(op_);
    else if (ig > 0.0 && ig < 1.0)
        a_tilde_ = solve_on_ray(op_, std::vector<double>(a_.size(), 1.0), ig);
}

template <class Fn>
double ImplicitContext::memo(Tag tag, double s, double w, Fn&& compute) const {
    const Key key{tag, std::bit_cast<std::uint64_t>(s), std::bit_cast<std::uint64_t>(w)};
    {
        std::lock_guard lock(cache_->mutex);
        const auto it = cache_->values.find(key);
        if (it != cache_->values.end()) return it->second;
    }
    const double v = compute();
    std::lock_guard lock(cache_->mutex);
    cache_->values.emplace(key, v);
    return v;
}

double ImplicitContext::ray_solve(double target) const {
    if (target == 1.0) return 1.0;
    return solve_on_ray(op_, a_, target);
}

double ImplicitContext::coordinate_solve(double target, double scale, double w, double hint) const {
    const std::size_t n = a_.size();
    std::vector<double> rest(n - 1);
    for (std::size_t i = 1; i < n; ++i) rest[i - 1] = (scale > 0.0 ? scale : a_[i]) * w;
    return solve_first_coordinate(op_, rest, target, hint);
}

double ImplicitContext::w0(double s) const {
    return memo(Tag::w0, s, 0.0, [&] { return ray_solve(rhs_.g_upper(s)); });
}

double ImplicitContext::W0(double s) const {
    return memo(Tag::W0, s, 0.0, [&] { return ray_solve(rhs_.g_lower(s)); });
}

double ImplicitContext::h(double s, double w, bool check_domain) const {
    const double w0s = w0(s);
    if (w == w0s) return a_.front() * w0s;
    if (check_domain && w < w0s) {
        std::ostringstream os;
        os << "h(s, w) needs w >= w0(s): w = " << w << ", w0(" << s << ") = " << w0s;
        throw DomainError(os.str());
    }
    return memo(Tag::h, s, w, [&] { return coordinate_solve(rhs_.g_upper(s), 0.0, w, a_.front() * w); });
}

double ImplicitContext::H(double s, double w, bool check_domain) const {
    const double W0s = W0(s);
    if (w == W0s) return a_.front() * W0s;
    if (check_domain && !(w > 0.0 && w <= W0s)) {
        std::ostringstream os;
        os << "H(s, w) needs 0 < w <= W0(s): w = " << w << ", W0(" << s << ") = " << W0s;
        throw DomainError(os.str());
    }
    return memo(Tag::H, s, w, [&] { return coordinate_solve(rhs_.g_lower(s), 0.0, w, a_.front() * w); });
}

double ImplicitContext::a_tilde() const {
    if (!(a_tilde_ > 0.0)) throw NormalizationError("a~ needs 0 < inf g <= 1");
    return a_tilde_;
}

double ImplicitContext::hbar(double w) const {
    const double at = a_tilde();
    if (w == 1.0) return at;
    if (!(w > 0.0)) throw DomainError("hbar(w) needs w > 0");
    return memo(Tag::hbar, 0.0, w, [&] { return coordinate_solve(rhs_.inf_g(), at, w, at * w); });
}

std::size_t ImplicitContext::cache_size() const {
    std::lock_guard lock(cache_->mutex);
    return cache_->values.size();
}

void ImplicitContext::clear_cache() const {
    std::lock_guard lock(cache_->mutex);
    cache_->values.clear();
}

}  // namespace hessex
