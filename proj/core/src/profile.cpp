#include "hessex/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "hessex/errors.hpp"

namespace hessex {

// ---------------------------------------------------------------------------
// TailModel

double TailModel::value(double s) const {
    if (log_corrected) return std::pow(s, -p1) * (c1 * std::log(s) + c2);
    return c1 * std::pow(s, -p1) + c2 * std::pow(s, -p2);
}

double TailModel::derivative(double s) const {
    if (log_corrected) return std::pow(s, -p1 - 1.0) * (c1 - p1 * (c1 * std::log(s) + c2));
    return -p1 * c1 * std::pow(s, -p1 - 1.0) - p2 * c2 * std::pow(s, -p2 - 1.0);
}

double TailModel::integral_from(double s) const {
    if (zero()) return 0.0;
    if (!(p1 > 1.0)) {
        std::ostringstream os;
        os << "tail exponent " << p1 << " <= 1: integral of w - 1 diverges";
        throw AsymptoticsError(os.str());
    }
    const double q = p1 - 1.0;
    if (log_corrected) return std::pow(s, -q) * (c1 * (std::log(s) / q + 1.0 / (q * q)) + c2 / q);
    return c1 * std::pow(s, -q) / q + c2 * std::pow(s, 1.0 - p2) / (p2 - 1.0);
}

TailModel fit_tail_model(const std::vector<double>& s, const std::vector<double>& y, double s_lo, double p1,
                         double p2, bool log_corrected) {
    TailModel m;
    m.p1 = p1;
    m.p2 = log_corrected ? p1 : p2;
    m.log_corrected = log_corrected;
    m.s_hi = s.back();
    const auto first = static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), s_lo) - s.begin());
    m.s_lo = s[std::min(first, s.size() - 1)];
    bool all_zero = true;
    for (std::size_t i = first; i < s.size(); ++i) all_zero = all_zero && y[i] == 0.0;
    if (all_zero) return m;

    auto basis = [&](double x) -> std::array<double, 2> {
        if (log_corrected) return {std::pow(x, -p1) * std::log(x), std::pow(x, -p1)};
        return {std::pow(x, -p1), std::pow(x, -m.p2)};
    };
    // relative least squares: weight 1 / |y|, normalized basis columns
    double a11 = 0, a12 = 0, a22 = 0, r1 = 0, r2 = 0;
    for (std::size_t i = first; i < s.size(); ++i) {
        if (y[i] == 0.0) continue;
        const auto b = basis(s[i]);
        const double inv = 1.0 / std::abs(y[i]);
        const double u = b[0] * inv, v = b[1] * inv, r = y[i] * inv;
        a11 += u * u;
        a12 += u * v;
        a22 += v * v;
        r1 += u * r;
        r2 += v * r;
    }
    const double det = a11 * a22 - a12 * a12;
    if (std::abs(det) > 1e-10 * a11 * a22) {
        m.c1 = (r1 * a22 - r2 * a12) / det;
        m.c2 = (a11 * r2 - a12 * r1) / det;
    } else {
        m.c1 = r1 / a11;
        m.c2 = 0.0;
    }
    for (std::size_t i = first; i < s.size(); ++i)
        if (y[i] != 0.0) m.misfit = std::max(m.misfit, std::abs(m.value(s[i]) / y[i] - 1.0));

    // free-exponent one-term fit on the upper half (in log s) of the window
    const double mid = std::sqrt(m.s_lo * m.s_hi);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    double sign = 0.0;
    for (std::size_t i = first; i < s.size(); ++i) {
        if (s[i] < mid || y[i] == 0.0) continue;
        const double lx = std::log(s[i]), ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
        sign = y[i] > 0 ? 1.0 : -1.0;
    }
    if (cnt >= 3 && p1 > 1.0) {
        const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        const double icpt = (sy - slope * sx) / cnt;
        const double p = -slope;
        if (p > 1.0) {
            const double free_tail = sign * std::exp(icpt) * std::pow(m.s_hi, 1.0 - p) / (p - 1.0);
            m.error_bound = std::abs(free_tail - m.integral_from(m.s_hi));
        } else {
            m.error_bound = std::numeric_limits<double>::infinity();
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// BarrierProfile

namespace {

// integrals over [0, theta] of the cubic Hermite basis h00, h10, h01, h11
std::array<double, 4> hermite_integrals(double th) {
    const double t2 = th * th, t3 = t2 * th, t4 = t3 * th;
    return {th - t3 + 0.5 * t4, 0.5 * t2 - 2.0 * t3 / 3.0 + 0.25 * t4, t3 - 0.5 * t4, -t3 / 3.0 + 0.25 * t4};
}

}  // namespace

BarrierProfile::BarrierProfile(Kind kind, double first, double second, double delta, const OdeTrajectory& traj,
                               Exponents exponents)
    : kind_(kind), first_(first), second_(second), delta_(delta), exponents_(exponents) {
    const std::size_t n = traj.t.size();
    if (n < 4) throw IntegrationError("profile needs at least four nodes");
    s_.resize(n);
    y_ = traj.y;
    dy_.resize(n);
    cum_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        s_[i] = std::exp(traj.t[i]);
        dy_[i] = traj.dy[i] / s_[i];
    }
    s_.front() = std::exp(traj.t.front());
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = s_[i + 1] - s_[i];
        cum_[i + 1] = cum_[i] + 0.5 * h * (y_[i] + y_[i + 1]) + h * h / 12.0 * (dy_[i] - dy_[i + 1]);
    }
    const double a = exponents_.alpha, b = exponents_.beta_half;
    const bool forced = std::isfinite(b);
    const bool coincide = forced && std::abs(a - b) < 0.05;
    const double p1 = forced ? std::min(a, b) : a;
    const double p2 = forced ? std::max(a, b) : 2.0 * a;
    tail_ = fit_tail_model(s_, y_, s_.back() / 10.0, p1, p2, coincide);
}

std::string BarrierProfile::kind_name() const {
    switch (kind_) {
    case Kind::Sub: return "sub";
    case Kind::Super: return "super";
    case Kind::Radial: return "radial";
    }
    return "?";
}

BarrierProfile BarrierProfile::with_first(double first) const {
    BarrierProfile p = *this;
    p.first_ = first;
    return p;
}

double BarrierProfile::wm1(double s) const {
    if (s > s_.back()) return tail_.value(s);
    if (s < s_.front()) {
        if (s > s_.front() * (1.0 - 1e-14)) s = s_.front();
        else throw DomainError("profile evaluated below its start");
    }
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    const std::size_t j = it == s_.end() ? s_.size() - 1 : static_cast<std::size_t>(it - s_.begin());
    const std::size_t i = j - 1;
    const double h = s_[j] - s_[i];
    const double th = (s - s_[i]) / h;
    const double t2 = th * th, t3 = t2 * th;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + th) * h * dy_[i] + (-2 * t3 + 3 * t2) * y_[j] +
           (t3 - t2) * h * dy_[j];
}

double BarrierProfile::dw(double s) const {
    if (slope_) return slope_(s, w(s));
    return dw_interpolated(s);
}

double BarrierProfile::dw_interpolated(double s) const {
    if (s > s_.back()) return tail_.derivative(s);
    if (s < s_.front()) {
        if (s > s_.front() * (1.0 - 1e-14)) s = s_.front();
        else throw DomainError("profile evaluated below its start");
    }
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    const std::size_t j = it == s_.end() ? s_.size() - 1 : static_cast<std::size_t>(it - s_.begin());
    const std::size_t i = j - 1;
    const double h = s_[j] - s_[i];
    const double th = (s - s_[i]) / h;
    const double t2 = th * th;
    return ((6 * t2 - 6 * th) * y_[i] + (3 * t2 - 4 * th + 1) * h * dy_[i] + (-6 * t2 + 6 * th) * y_[j] +
            (3 * t2 - 2 * th) * h * dy_[j]) /
           h;
}

double BarrierProfile::cumulative(double s) const {
    if (s >= s_.back()) {
        if (s == s_.back()) return cum_.back();
        return cum_.back() + tail_.integral_from(s_.back()) - tail_.integral_from(s);
    }
    if (s <= s_.front()) {
        if (s >= s_.front() * (1.0 - 1e-14)) return 0.0;
        throw DomainError("profile evaluated below its start");
    }
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    const std::size_t j = static_cast<std::size_t>(it - s_.begin());
    const std::size_t i = j - 1;
    const double h = s_[j] - s_[i];
    const auto q = hermite_integrals((s - s_[i]) / h);
    return cum_[i] + h * (q[0] * y_[i] + q[1] * h * dy_[i] + q[2] * y_[j] + q[3] * h * dy_[j]);
}

double BarrierProfile::u(double s) const { return first_ + (s - s_.front()) + cumulative(s); }

double BarrierProfile::integral_wm1(double s_a, double s_b) const { return cumulative(s_b) - cumulative(s_a); }

double BarrierProfile::mu(double s_from) const {
    return (cum_.back() - cumulative(s_from)) + tail_.integral_from(s_.back()) - s_from;
}

}  // namespace hessex
