#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "hessex/errors.hpp"

namespace hessex {

/// Interval carrying a sign change of a scalar residual.
struct RootBracket {
    double lo = 0.0;
    double hi = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;

    bool valid() const { return f_lo * f_hi <= 0.0; }
};

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Newton iteration kept inside a sign-change bracket, falling back to
/// bisection whenever the Newton step leaves the bracket or stalls.
/// Runs to machine resolution of the bracket.
template <class F, class DF>
RootResult solve_bracketed(F&& f, DF&& df, RootBracket b, int max_iter = 200) {
    if (!b.valid()) throw ArgumentError("solve_bracketed: residual has no sign change on bracket");
    if (b.f_lo == 0.0) return {b.lo, 0.0, 0};
    if (b.f_hi == 0.0) return {b.hi, 0.0, 0};

    // orient so that f(lo) < 0 < f(hi)
    double lo = b.lo, hi = b.hi;
    if (b.f_lo > 0.0) std::swap(lo, hi);

    double best_x = 0.5 * (b.lo + b.hi);
    double best_r = std::numeric_limits<double>::infinity();
    double x = best_x;
    double dx_old = std::abs(b.hi - b.lo);
    double dx = dx_old;
    double fx = f(x);
    double dfx = df(x);
    int it = 0;
    for (; it < max_iter; ++it) {
        if (std::abs(fx) < best_r) {
            best_r = std::abs(fx);
            best_x = x;
        }
        if (fx == 0.0) break;
        if (fx < 0.0) lo = x; else hi = x;

        const bool newton_outside = ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) > 0.0;
        const bool newton_slow = std::abs(2.0 * fx) > std::abs(dx_old * dfx);
        dx_old = dx;
        if (newton_outside || newton_slow || !std::isfinite(dfx) || dfx == 0.0) {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx = fx / dfx;
            x -= dx;
        }
        const double scale = std::max(std::abs(x), std::numeric_limits<double>::min());
        if (std::abs(hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() * scale ||
            std::abs(dx) <= std::numeric_limits<double>::epsilon() * scale) {
            fx = f(x);
            if (std::abs(fx) < best_r) {
                best_r = std::abs(fx);
                best_x = x;
            }
            ++it;
            break;
        }
        fx = f(x);
        dfx = df(x);
    }
    return {best_x, best_r, it};
}

/// Brent's method for expensive residuals without derivatives.
/// Stops when the bracket is narrower than `xtol` (absolute).
template <class F>
RootResult brent(F&& f, RootBracket b, double xtol, int max_iter = 100) {
    if (!b.valid()) throw ArgumentError("brent: residual has no sign change on bracket");
    double a = b.lo, fa = b.f_lo;
    double bb = b.hi, fb = b.f_hi;
    if (fa == 0.0) return {a, 0.0, 0};
    if (fb == 0.0) return {bb, 0.0, 0};
    double c = a, fc = fa, d = bb - a, e = d;
    int it = 0;
    for (; it < max_iter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = bb - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = bb; bb = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(bb) + 0.5 * xtol;
        const double xm = 0.5 * (c - bb);
        if (std::abs(xm) <= tol1 || fb == 0.0) break;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (bb - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
            const double min2 = std::abs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = bb;
        fa = fb;
        bb += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(bb);
    }
    return {bb, std::abs(fb), it};
}

}  // namespace hessex
