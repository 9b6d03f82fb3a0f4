#pragma once

#include <span>
#include <vector>

namespace hessex {

/// Boundary data phi(x) = constant + linear.x + (1/2) x^T Q x restricted to
/// the boundary. Degree <= 2 covers constants and the spherical harmonics of
/// degree one and two.
struct BoundaryData {
    double constant = 0.0;
    std::vector<double> linear;     // empty means zero
    std::vector<double> quadratic;  // row-major n x n, empty means zero

    double value(std::span<const double> x) const;
    std::vector<double> gradient(std::span<const double> x) const;
    /// spectral bound |Q|, used as the tangential second-derivative bound
    double second_derivative_bound() const;
    bool operator==(const BoundaryData&) const = default;
};

struct BoundaryPoint {
    std::vector<double> x;
    std::vector<double> normal;  // outer unit normal
    double phi = 0.0;
    std::vector<double> tangential_gradient;
};

/// Axis-aligned ellipsoid D = {sum ((x_i - c_i) / r_i)^2 < 1} with boundary data.
class DomainSpec {
public:
    DomainSpec(std::vector<double> center, std::vector<double> semi_axes, BoundaryData phi);
    static DomainSpec ball(std::size_t n, double radius = 1.0, BoundaryData phi = {});

    std::size_t dimension() const noexcept { return center_.size(); }
    const std::vector<double>& center() const noexcept { return center_; }
    const std::vector<double>& semi_axes() const noexcept { return axes_; }
    const BoundaryData& phi() const noexcept { return phi_; }
    bool is_centered_ball() const;

    /// sum ((x_i - c_i) / r_i)^2
    double level(std::span<const double> x) const;
    bool contains(std::span<const double> x) const { return level(x) < 1.0; }
    /// rho > 0 with rho d on the boundary; the origin must lie inside D
    double exit_radius(std::span<const double> d) const;
    std::vector<double> outer_normal(std::span<const double> x) const;

    /// Quasi-uniform boundary mesh (Fibonacci lattice pushed onto the ellipsoid for n = 3).
    std::vector<BoundaryPoint> boundary_mesh(std::size_t count) const;
    /// typical spacing of a mesh with `count` points
    double mesh_spacing(std::size_t count) const;

    /// Copy with phi replaced by phi - b.x.
    DomainSpec subtract_linear(std::span<const double> b) const;

private:
    std::vector<double> center_, axes_;
    BoundaryData phi_;
};

}  // namespace hessex
