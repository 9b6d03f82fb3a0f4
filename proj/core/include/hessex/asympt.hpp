#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "hessex/profile.hpp"
#include "hessex/symfun.hpp"

namespace hessex {

struct DecayFit {
    /// fitted exponent p in values ~ s^p (negative for decay); with
    /// log_correction, the p of values ~ s^p ln s
    double exponent = 0.0;
    /// plain log-log slope over the window, whatever the model
    double raw_slope = 0.0;
    bool log_correction = false;
    double s_lo = 0.0;
    double s_hi = 0.0;
    /// RMS residual of the log-log regression actually used
    double residual = 0.0;
    std::size_t points = 0;
};

/// Rates expected from the linearization, used to decide whether the
/// logarithmic model applies (|alpha - beta/2| < 0.05).
struct DecayHints {
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double beta_half = std::numeric_limits<double>::infinity();
};

/// Least-squares slope of log values against log s over the last decade of
/// the grid. Values must be positive there.
DecayFit fit_decay(const std::vector<double>& s, const std::vector<double>& values, DecayHints hints = {});

/// Tail fit of |w - 1| for a profile.
DecayFit fit_profile_decay(const BarrierProfile& profile);

/// a.grad f(a) / ((2 a_n + delta) d_1 f(a))
double alpha_delta(const SymmetricOperator& op, const std::vector<double>& a, double delta);

struct SBarResult {
    double s_bar = 0.0;
    double epsilon = 0.0;
    std::size_t directions = 0;
    std::size_t shells_checked = 0;
    /// largest |grad f(p) - grad f(a)| seen at or beyond s_bar
    double worst_gradient_gap = 0.0;
    /// min of f(comparison) - f(lambda(D^2 U)) at or beyond s_bar
    double direct_margin = std::numeric_limits<double>::infinity();
    std::size_t direct_samples = 0;
};

/// Threshold beyond which f(lambda(D^2 U)) <= f(a_1 U' + (2a_n + delta) s U'', a_2 U', ..., a_n U')
/// for the radial profile U(s), s = x^T A x / 2.
///
/// Grid shells are scanned from the outside in; a shell passes when, for
/// `directions` quasi-uniform points of the level set, every point on the
/// segment between lambda(D^2 U) and the comparison vector has
/// |grad f - grad f(a)| < epsilon = delta / (2 (4 a_n + delta)) d_1 f(a).
/// The returned s_bar is the smallest shell such that it and every outer
/// shell pass. The conclusion is also checked directly on those shells.
SBarResult detect_s_bar(const SymmetricOperator& op, const std::vector<double>& a, double delta,
                        const BarrierProfile& profile, std::size_t directions = 64);

}  // namespace hessex
