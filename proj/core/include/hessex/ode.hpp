#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "hessex/errors.hpp"

namespace hessex {

struct OdeOptions {
    double rtol = 1e-11;
    double atol = 1e-20;
    double h_init = 1e-3;
    double h_max = 5e-3;
    double h_min = 1e-14;
    std::size_t max_steps = 2'000'000;
};

/// Accepted steps of a scalar solution: t, y and dy/dt at every node.
struct OdeTrajectory {
    std::vector<double> t, y, dy;
};

/// Dormand-Prince 5(4) with FSAL and a PI-free standard controller, for a
/// scalar y' = F(t, y). `observe(t, y)` may throw to abort on a violated
/// invariant at an accepted node.
template <class F, class Observe>
OdeTrajectory integrate_dp5(F&& rhs, double t0, double y0, double t1, const OdeOptions& opt, Observe&& observe) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeTrajectory out;
    double t = t0, y = y0;
    double k1 = rhs(t, y);
    out.t.push_back(t);
    out.y.push_back(y);
    out.dy.push_back(k1);
    double h = std::min(opt.h_init, opt.h_max);
    std::size_t steps = 0;
    while (t < t1) {
        if (++steps > opt.max_steps) throw IntegrationError("step budget exhausted");
        const bool last = t + h >= t1;
        if (last) h = t1 - t;
        const double k2 = rhs(t + c2 * h, y + h * a21 * k1);
        const double k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const double k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const double k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const double y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const double k7 = rhs(t + h, y_new);
        const double err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double scale = opt.atol + opt.rtol * std::max(std::abs(y), std::abs(y_new));
        const double ratio = std::abs(err) / scale;
        if (!std::isfinite(ratio)) throw IntegrationError("non-finite step");
        if (ratio <= 1.0) {
            t = last ? t1 : t + h;
            y = y_new;
            k1 = k7;
            out.t.push_back(t);
            out.y.push_back(y);
            out.dy.push_back(k1);
            observe(t, y);
        }
        const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
        h = std::min(h * (ratio <= 1.0 ? factor : std::min(factor, 1.0)), opt.h_max);
        if (h < opt.h_min) {
            std::ostringstream os;
            os << "step size underflow at t = " << t << ", y = " << y;
            throw IntegrationError(os.str());
        }
    }
    return out;
}

template <class F>
OdeTrajectory integrate_dp5(F&& rhs, double t0, double y0, double t1, const OdeOptions& opt = {}) {
    return integrate_dp5(std::forward<F>(rhs), t0, y0, t1, opt, [](double, double) {});
}

}  // namespace hessex
