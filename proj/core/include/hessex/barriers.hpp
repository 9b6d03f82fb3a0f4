#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hessex/asympt.hpp"
#include "hessex/domain.hpp"
#include "hessex/implicit.hpp"
#include "hessex/profile.hpp"

namespace hessex {

// ---------------------------------------------------------------------------
// radial profiles

struct ProfileOptions {
    /// upper end of the integration grid as a multiple of s0
    double s_max_factor = 1e6;
    OdeOptions ode;
};

/// w' = (h(s, w) - a_1 w) / (2 a_n s), w(s0) = xi2 > w0(s0).
/// A positive s_start replaces s0 as the initial point.
BarrierProfile integrate_sub_w(const ImplicitContext& ctx, double xi2, double s_max, const OdeOptions& ode = {},
                               double s_start = 0.0);
/// w' = (H(s, w) - a_1 w) / ((2 a_n + delta) s), w(s0) = eta2 in (0, W0(s0)).
BarrierProfile integrate_super_w(const ImplicitContext& ctx, double eta2, double delta, double s_max,
                                 const OdeOptions& ode = {}, double s_start = 0.0);
/// w' = (hbar(w) - a~ w) / (2 a~ s), w(a~/2) = zeta2 >= 1.
BarrierProfile integrate_radial_w(const ImplicitContext& ctx, double zeta2, double s_max, const OdeOptions& ode = {});

/// delta = a_n (alpha - 1), so that alpha_delta = 2 alpha / (alpha + 1)
double choose_delta(const SymmetricOperator& op, const std::vector<double>& a);
/// smallest K with f(K a) >= sup_g
double choose_K(const SymmetricOperator& op, const std::vector<double>& a, double sup_g);

// ---------------------------------------------------------------------------
// boundary barriers

/// omega(x) = phi(xi) + (K/2) [(x - xbar)^T A (x - xbar) - (xi - xbar)^T A (xi - xbar)]
struct BoundaryBarrier {
    std::vector<double> xi;
    double phi_xi = 0.0;
    std::vector<double> xbar;
    /// K A (xi - xbar) = grad~phi(xi) + t K nu(xi)
    std::vector<double> slope;
    double t = 0.0;
    /// min over mesh points j != xi of phi(x_j) - omega(x_j)
    double margin = 0.0;

    /// evaluated as phi(xi) + (K/2) d^T A d + slope.d with d = x - xi
    double value(std::span<const double> x, std::span<const double> a, double K) const;
};

struct BoundaryBarrierSet {
    double K = 1.0;
    std::vector<double> a;
    std::vector<BoundaryBarrier> barriers;
    double mesh_spacing = 0.0;
    /// max |xbar| over the set
    double xbar_bound = 0.0;
    double min_margin = 0.0;

    /// max over xi of omega_xi(x)
    double value(std::span<const double> x) const;
};

/// Barrier at mesh point `index`: t doubles from 1/64 until omega < phi at
/// every other mesh point, with margin >= 1e-10 outside a neighbourhood of
/// xi of radius 2.5 mesh spacings.
BoundaryBarrier boundary_barrier(const std::vector<BoundaryPoint>& mesh, std::size_t index,
                                 const std::vector<double>& a, double K, double neighbourhood);
BoundaryBarrierSet build_boundary_barriers(const DomainSpec& domain, const std::vector<double>& a, double K,
                                           std::size_t mesh_points);

// ---------------------------------------------------------------------------
// spliced barriers

struct ConstructionOptions {
    /// 0 selects the defaults 2 s0 and 4 s0
    double s1 = 0.0;
    double s2 = 0.0;
    /// 0 selects r1 = 1.25 sqrt(2 s^ / a_1), r2 = 2 r1
    double r1 = 0.0;
    double r2 = 0.0;
    std::size_t boundary_points = 2000;
    std::size_t region_samples = 20000;
    std::size_t level_samples = 2000;
    std::size_t s_bar_directions = 64;
    /// zeta2 is this factor times the smallest admissible value
    double zeta2_safety = 1.1;
    ProfileOptions profile;
};

/// The c-independent part of the construction, and the threshold c_star.
struct BarrierSetup {
    std::vector<double> a;
    double s0 = 0.0;
    double s1 = 0.0, s2 = 0.0;
    double alpha = 0.0;
    double K = 1.0;
    ProfileOptions profile;
    std::vector<BoundaryPoint> mesh;
    std::shared_ptr<const BoundaryBarrierSet> barriers;
    double phi_max = 0.0;

    // subsolution side
    double m = 0.0;
    double level_s1_min_barrier = 0.0;
    double level_s2_max_barrier = 0.0;
    double C_bar = 0.0;
    double c_star_sub = 0.0;

    // supersolution side
    bool quadratic_super = false;
    double c_star_super = 0.0;
    double eta2 = 0.0;
    double delta = 0.0;
    double alpha_delta = 0.0;
    double mu_bar = 0.0;
    double mu_bar_error = 0.0;
    std::optional<SBarResult> s_bar;
    double s_hat = 0.0;
    double r1 = 0.0, r2 = 0.0;
    double a_tilde = 0.0;
    double zeta2 = 0.0;
    double zeta2_root = 0.0;
    std::optional<BarrierProfile> super_profile;   // eta1 = 0
    std::optional<BarrierProfile> radial_profile;  // zeta1 = 0

    double c_star = 0.0;
};

BarrierSetup prepare_barriers(const ImplicitContext& ctx, const DomainSpec& domain,
                              const ConstructionOptions& options = {});

/// max of the two lower bounds for c
inline double compute_c_star(const ImplicitContext& ctx, const DomainSpec& domain,
                             const ConstructionOptions& options = {}) {
    return prepare_barriers(ctx, domain, options).c_star;
}

class Subsolution {
public:
    enum class Piece { Barrier, Profile };
    struct Eval {
        double value;
        Piece piece;
    };

    Subsolution(const BarrierSetup& setup, BarrierProfile profile);

    const BarrierProfile& profile() const noexcept { return profile_; }
    double xi1() const { return profile_.first(); }
    double xi2() const { return profile_.second(); }

    /// three-piece max: barrier below s1, max of both up to s2, profile beyond
    Eval eval(std::span<const double> x) const;
    double value(std::span<const double> x) const { return eval(x).value; }
    /// eigenvalues of the Hessian of the active piece
    std::vector<double> active_eigenvalues(std::span<const double> x) const;

private:
    std::shared_ptr<const BoundaryBarrierSet> barriers_;
    std::vector<double> a_;
    double s1_, s2_;
    BarrierProfile profile_;
};

class Supersolution {
public:
    enum class Piece { Quadratic, Radial, Profile };
    struct Eval {
        double value;
        Piece piece;
    };

    /// quadratic supersolution s + c
    Supersolution(const BarrierSetup& setup, double c);
    /// spliced min of v and U
    Supersolution(const BarrierSetup& setup, BarrierProfile super, BarrierProfile radial);

    bool quadratic() const noexcept { return !super_; }
    const std::optional<BarrierProfile>& super_profile() const noexcept { return super_; }
    const std::optional<BarrierProfile>& radial_profile() const noexcept { return radial_; }
    double eta1() const { return super_ ? super_->first() : 0.0; }
    double zeta1() const { return radial_ ? radial_->first() : 0.0; }

    Eval eval(std::span<const double> x) const;
    double value(std::span<const double> x) const { return eval(x).value; }
    std::vector<double> active_eigenvalues(std::span<const double> x) const;

private:
    std::vector<double> a_;
    double a_tilde_ = 0.0;
    double r1_ = 0.0, r2_ = 0.0;
    double c_ = 0.0;
    std::optional<BarrierProfile> super_, radial_;
};

struct SpliceReport {
    double c = 0.0;
    double c_star = 0.0;
    double xi1 = 0.0, xi2 = 0.0;
    double eta1 = 0.0, eta2 = 0.0, delta = 0.0;
    double zeta1 = 0.0, zeta2 = 0.0;
    double s1 = 0.0, s2 = 0.0, r1 = 0.0, r2 = 0.0;
    double s_bar = 0.0;
    /// sub: min_{dD_s1} w_ - u(s1), u(s2) - max_{dD_s2} w_
    double sub_splice_inner = 0.0, sub_splice_outer = 0.0;
    /// super: min_{dB_r1} U - max_{dB_r1} v, min_{dB_r2} v - max_{dB_r2} U
    double super_splice_inner = 0.0, super_splice_outer = 0.0;
    /// min over dD of u_bar - phi
    double super_boundary_margin = 0.0;
    /// |xi1 + mu(s0, xi2) - c|
    double far_field_mismatch = 0.0;
    double sandwich_margin = 0.0;
    std::size_t sandwich_samples = 0;
    bool ok = false;
};

struct SplicedBarriers {
    Subsolution sub;
    Supersolution super;
    SpliceReport report;
};

/// Barriers for one c > c_star. Throws SpliceFailure when c <= c_star.
SplicedBarriers build_barriers(const ImplicitContext& ctx, const DomainSpec& domain, const BarrierSetup& setup,
                               double c, std::size_t sandwich_samples = 10000);

// ---------------------------------------------------------------------------
// verification

/// Quasi-random points outside D with s(x) <= s_outer, log-distributed in radius.
std::vector<std::vector<double>> exterior_samples(const DomainSpec& domain, const std::vector<double>& a,
                                                  double radius_outer, std::size_t count);

struct InequalityCheck {
    std::size_t samples = 0;
    std::size_t failures = 0;
    std::size_t cone_failures = 0;
    /// sub: min f - g; super: min g - f
    double worst_margin = 0.0;
    std::vector<double> worst_point;
};

InequalityCheck verify_subsolution(const ImplicitContext& ctx, const Subsolution& sub,
                                   const std::vector<std::vector<double>>& points, double tolerance = 1e-8);
/// Points where the profile piece is active are only checked for s > s_hat.
InequalityCheck verify_supersolution(const ImplicitContext& ctx, const Supersolution& super,
                                     const std::vector<std::vector<double>>& points, double s_hat,
                                     double tolerance = 1e-8);

/// CSV: '#' header lines with kind and parameters, then s,w,u,w_minus_1.
std::string profile_csv(const BarrierProfile& profile);

}  // namespace hessex
