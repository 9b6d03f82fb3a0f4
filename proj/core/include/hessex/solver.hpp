#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hessex/barriers.hpp"
#include "hessex/domain.hpp"
#include "hessex/implicit.hpp"
#include "hessex/linalg.hpp"

namespace hessex {

using FieldFn = std::function<double(std::span<const double>)>;
using RadialFn = std::function<double(double)>;

struct SolveReport {
    std::string mode;
    std::size_t unknowns = 0;
    std::size_t iterations = 0;
    bool converged = false;
    /// max over unknown nodes of |f(lambda(D_h^2 u)) - g|
    double residual = 0.0;
    double last_update = 0.0;
    std::vector<double> residual_history;
    /// min(u - lower), min(upper - u) over unknown nodes
    double lower_margin = 0.0;
    double upper_margin = 0.0;
    /// max |u - phi| over boundary closure values (zero by construction for Dirichlet nodes)
    double boundary_error = 0.0;
    double far_constant = 0.0;
    double far_constant_std = 0.0;
    std::size_t far_nodes = 0;
    /// nodes whose update was frozen by the cone guard in the last sweep
    std::size_t cone_frozen = 0;
    std::size_t step_halvings = 0;
    std::size_t monotonicity_violations = 0;
    /// nodes whose cross differences fell back to the central stencil with phi-extended corners
    std::size_t stencil_fallbacks = 0;
};

// ---------------------------------------------------------------------------
// symmetric reduction

/// A = a* I, D a centered ball, constant phi and radial g.
bool symmetric_reduction_applies(const ImplicitContext& ctx, const DomainSpec& domain);

/// Barriers for the symmetric reduction, valid for any feasible c:
/// the sub profile started at the boundary shell with u = phi and far constant c,
/// and the super profile with w = W0 at the boundary shell shifted to far constant c.
struct RadialBarriers {
    double s_boundary = 0.0;
    BarrierProfile sub;
    BarrierProfile super;
};
RadialBarriers radial_barriers(const ImplicitContext& ctx, const DomainSpec& domain, double c,
                               const ProfileOptions& options = {});

struct RadialOptions {
    std::size_t nodes = 20001;
    /// outer truncation s_R as a multiple of s0
    double s_outer_factor = 1e3;
    double residual_tol = 1e-8;
    double update_tol = 1e-13;
    std::size_t max_iterations = 200;
};

struct RadialSolution {
    std::vector<double> s, u;
    SolveReport report;

    /// u - s interpolated linearly in ln s; clamps outside [s_b, s_R]
    double at(double s_query) const;
};

/// Damped Newton for f(a*(u' + 2 s u''), a* u', ..., a* u') = g(s) on a grid
/// uniform in ln s over [s_b, s_R], with u(s_b) = phi and u(s_R) = upper(s_R).
/// Steps are halved until every node is admissible, stays inside
/// [lower - 1e-9, upper + 1e-9] and the max residual decreases.
RadialSolution solve_radial(const ImplicitContext& ctx, double s_boundary, double phi, const RadialFn& lower,
                            const RadialFn& upper, const RadialOptions& options = {},
                            const RadialFn& initial = nullptr);

/// Mean and standard deviation of u - s over nodes with s >= 0.8 max s.
std::pair<double, double> estimate_far_constant(const std::vector<double>& s, const std::vector<double>& u);

// ---------------------------------------------------------------------------
// Cartesian grid (n = 3)

class CartesianGrid {
public:
    enum class Node : std::uint8_t { Inside, Dirichlet, Unknown };

    /// points^3 nodes on [-half_width, half_width]^3; nodes on the faces are Dirichlet
    CartesianGrid(const DomainSpec& domain, std::size_t points, double half_width);

    std::size_t points() const noexcept { return m_; }
    double spacing() const noexcept { return h_; }
    double half_width() const noexcept { return L_; }
    std::size_t size() const noexcept { return kind_.size(); }
    Node kind(std::size_t node) const { return kind_[node]; }
    std::array<double, 3> position(std::size_t node) const;
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * m_ + j) * m_ + k; }
    const std::vector<std::size_t>& unknowns() const noexcept { return unknowns_; }
    const DomainSpec& domain() const noexcept { return domain_; }

    /// One arm of a second difference: a grid neighbour or a boundary crossing.
    struct Arm {
        double theta = 1.0;                 // arm length in units of h |v|
        std::size_t neighbour = SIZE_MAX;   // SIZE_MAX when the arm ends on dD
        double boundary_value = 0.0;        // phi at the crossing
    };
    /// Stencil of an unknown node: Shortley-Weller along the axes and a
    /// cross difference per coordinate pair.
    struct Stencil {
        std::array<Arm, 3> plus, minus;
        /// per pair (0,1), (0,2), (1,2): quadrant signs, 0 = central four-point
        std::array<std::array<int, 2>, 3> quadrant{};
        /// per pair: central stencil with phi evaluated at corners inside D
        std::array<bool, 3> fallback{};
        bool isotropic = true;
    };
    const Stencil& stencil(std::size_t node) const;
    /// every axis arm has length one and every cross difference is central
    bool isotropic(std::size_t node) const { return stencil(node).isotropic; }
    std::size_t stencil_fallbacks() const noexcept { return fallbacks_; }
    /// number of unknown nodes with a boundary crossing in some arm
    std::size_t cut_nodes() const noexcept { return cut_; }

private:
    DomainSpec domain_;
    std::size_t m_;
    double L_, h_;
    std::vector<Node> kind_;
    std::vector<std::size_t> unknowns_;
    std::vector<Stencil> stencils_;
    std::vector<std::size_t> slot_;  // node -> position in unknowns_, SIZE_MAX otherwise
    std::size_t fallbacks_ = 0, cut_ = 0;
};

/// Finite-difference Hessian at an unknown node, written as M0 - u0 C where
/// u0 is the node value: returns M0 (u0 = 0) and C.
struct AffineHessian {
    SymMatrix m0, c;
};
AffineHessian assemble_affine_hessian(const CartesianGrid& grid, const std::vector<double>& u, std::size_t node);
/// D_h^2 u at an unknown node.
SymMatrix assemble_hessian_fd(const CartesianGrid& grid, const std::vector<double>& u, std::size_t node);

struct Full3DOptions {
    std::size_t points = 24;
    double half_width = 1.75;
    double update_tol = 1e-10;
    std::size_t max_iterations = 20000;
    /// fraction of the local correction applied per sweep
    double relaxation = 0.5;
    /// residual is recorded every this many sweeps
    std::size_t history_stride = 50;
};

struct Full3DSolution {
    CartesianGrid grid;
    std::vector<double> u;
    SolveReport report;
};

/// Nonlinear Jacobi: every unknown node solves its own scalar equation with
/// the neighbours of the previous sweep, the result is clamped to
/// [lower, upper], and all nodes are updated together. Starts from `lower`
/// unless `initial` is given. Face nodes take `outer`.
Full3DSolution solve_full3d(const ImplicitContext& ctx, const DomainSpec& domain, const FieldFn& lower,
                            const FieldFn& upper, const FieldFn& outer, const Full3DOptions& options = {},
                            const FieldFn& initial = nullptr);

/// CSV with '#' header lines: "s,u" for the radial mode.
std::string radial_field_csv(const RadialSolution& sol);
/// CSV "x,y,z,u" over exterior nodes.
std::string full3d_field_csv(const Full3DSolution& sol);

}  // namespace hessex
