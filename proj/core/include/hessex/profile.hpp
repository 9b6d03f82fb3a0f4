#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hessex/ode.hpp"

namespace hessex {

/// Fixed-exponent model of y(s) = w(s) - 1 beyond the integration grid:
///   y = c1 s^{-p1} + c2 s^{-p2}            (plain)
///   y = s^{-p1} (c1 ln s + c2)             (log_corrected, p1 = p2)
/// Coefficients come from a relative least-squares fit over [s_lo, s_hi].
struct TailModel {
    double p1 = 0.0;
    double p2 = 0.0;
    bool log_corrected = false;
    double c1 = 0.0;
    double c2 = 0.0;
    double s_lo = 0.0;
    double s_hi = 0.0;
    /// max relative misfit on the fit window
    double misfit = 0.0;
    /// |difference| between this model's tail integral at s_hi and that of a
    /// one-term free-exponent fit; a heuristic bound for the tail error
    double error_bound = 0.0;

    double value(double s) const;
    double derivative(double s) const;
    /// integral of the model from s to infinity; requires p1 > 1
    double integral_from(double s) const;
    bool zero() const { return c1 == 0.0 && c2 == 0.0; }
};

/// values y on nodes s (increasing); window = nodes with s >= s_lo
TailModel fit_tail_model(const std::vector<double>& s, const std::vector<double>& y, double s_lo, double p1,
                         double p2, bool log_corrected);

/// Radial profile w = u' on a grid in s, with u recovered exactly as the
/// integral of the piecewise cubic Hermite interpolant of w.
class BarrierProfile {
public:
    enum class Kind { Sub, Super, Radial };

    struct Exponents {
        /// linearized decay rate of w - 1 without forcing
        double alpha = 0.0;
        /// beta/2 when g forces the equation, +inf otherwise
        double beta_half = std::numeric_limits<double>::infinity();
    };

    /// `traj` is in t = ln s with y = w - 1 and dy/dt.
    BarrierProfile(Kind kind, double first, double second, double delta, const OdeTrajectory& traj,
                   Exponents exponents);

    Kind kind() const noexcept { return kind_; }
    std::string kind_name() const;
    /// xi1 / eta1 / zeta1: u(s_start)
    double first() const noexcept { return first_; }
    /// xi2 / eta2 / zeta2: w(s_start)
    double second() const noexcept { return second_; }
    double delta() const noexcept { return delta_; }
    double s_start() const noexcept { return s_.front(); }
    double s_max() const noexcept { return s_.back(); }
    const Exponents& exponents() const noexcept { return exponents_; }
    const TailModel& tail() const noexcept { return tail_; }

    const std::vector<double>& nodes() const noexcept { return s_; }
    /// w - 1 at the nodes
    const std::vector<double>& node_wm1() const noexcept { return y_; }
    const std::vector<double>& node_dw() const noexcept { return dy_; }

    /// Same w, u shifted so that u(s_start) = first.
    BarrierProfile with_first(double first) const;

    /// dw/ds as a function of (s, w), normally the right-hand side of the
    /// ODE that produced the profile. When set, dw(s) is slope(s, w(s)), so
    /// that (w, dw) at every point lie on an exact trajectory through the
    /// interpolated value.
    using Slope = std::function<double(double, double)>;
    void set_slope(Slope slope) { slope_ = std::move(slope); }
    bool has_slope() const noexcept { return static_cast<bool>(slope_); }

    /// w - 1; beyond s_max the tail model is used
    double wm1(double s) const;
    double w(double s) const { return 1.0 + wm1(s); }
    /// dw/ds
    double dw(double s) const;
    /// derivative of the interpolant of w (of the tail model beyond s_max)
    double dw_interpolated(double s) const;
    /// first + (s - s_start) + integral of (w - 1) from s_start
    double u(double s) const;
    /// integral of (w - 1) over [s_a, s_b]
    double integral_wm1(double s_a, double s_b) const;
    /// integral of w over [s_a, s_b]
    double integral_w(double s_a, double s_b) const { return (s_b - s_a) + integral_wm1(s_a, s_b); }
    /// integral of (w - 1) from s_from to infinity, minus s_from
    double mu(double s_from) const;
    /// heuristic bound on the error of mu coming from the tail model
    double mu_error_bound() const { return tail_.error_bound; }
    /// lim (u(s) - s)
    double far_constant() const { return first_ + mu(s_start()); }

private:
    double cumulative(double s) const;

    Kind kind_;
    double first_, second_, delta_;
    std::vector<double> s_, y_, dy_, cum_;
    Exponents exponents_;
    TailModel tail_;
    Slope slope_;
};

}  // namespace hessex
