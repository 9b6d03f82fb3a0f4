#include "hessex/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hessex/errors.hpp"
#include "hessex/linalg.hpp"
#include "hessex/sampling.hpp"

namespace hessex {

double BoundaryData::value(std::span<const double> x) const {
    const std::size_t n = x.size();
    double v = constant;
    for (std::size_t i = 0; i < linear.size(); ++i) v += linear[i] * x[i];
    if (!quadratic.empty())
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) v += 0.5 * quadratic[i * n + j] * x[i] * x[j];
    return v;
}

std::vector<double> BoundaryData::gradient(std::span<const double> x) const {
    const std::size_t n = x.size();
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 0; i < linear.size(); ++i) g[i] = linear[i];
    if (!quadratic.empty())
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) g[i] += 0.5 * (quadratic[i * n + j] + quadratic[j * n + i]) * x[j];
    return g;
}

double BoundaryData::second_derivative_bound() const {
    if (quadratic.empty()) return 0.0;
    const auto n = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(quadratic.size()))));
    SymMatrix q(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) q(i, j) = 0.5 * (quadratic[i * n + j] + quadratic[j * n + i]);
    const auto e = eigenvalues_ascending(q);
    return std::max(std::abs(e.front()), std::abs(e.back()));
}

DomainSpec::DomainSpec(std::vector<double> center, std::vector<double> semi_axes, BoundaryData phi)
    : center_(std::move(center)), axes_(std::move(semi_axes)), phi_(std::move(phi)) {
    const std::size_t n = center_.size();
    if (n < 2 || axes_.size() != n) throw ArgumentError("domain: center and semi-axes must have equal length >= 2");
    for (double r : axes_)
        if (!(r > 0.0)) throw ArgumentError("domain: semi-axes must be positive");
    if (!phi_.linear.empty() && phi_.linear.size() != n) throw ArgumentError("domain: phi linear part has wrong size");
    if (!phi_.quadratic.empty() && phi_.quadratic.size() != n * n)
        throw ArgumentError("domain: phi quadratic part has wrong size");
    if (!(level(std::vector<double>(n, 0.0)) < 1.0)) throw ArgumentError("domain: the origin must lie inside D");
}

DomainSpec DomainSpec::ball(std::size_t n, double radius, BoundaryData phi) {
    return DomainSpec(std::vector<double>(n, 0.0), std::vector<double>(n, radius), std::move(phi));
}

bool DomainSpec::is_centered_ball() const {
    for (std::size_t i = 0; i < center_.size(); ++i)
        if (center_[i] != 0.0 || axes_[i] != axes_[0]) return false;
    return true;
}

double DomainSpec::level(std::span<const double> x) const {
    double l = 0.0;
    for (std::size_t i = 0; i < center_.size(); ++i) {
        const double t = (x[i] - center_[i]) / axes_[i];
        l += t * t;
    }
    return l;
}

double DomainSpec::exit_radius(std::span<const double> d) const {
    // sum ((rho d_i - c_i) / r_i)^2 = 1
    double qa = 0, qb = 0, qc = -1;
    for (std::size_t i = 0; i < center_.size(); ++i) {
        const double di = d[i] / axes_[i], ci = center_[i] / axes_[i];
        qa += di * di;
        qb -= 2 * di * ci;
        qc += ci * ci;
    }
    const double disc = qb * qb - 4 * qa * qc;
    const double root = std::sqrt(disc);
    // qc < 0, so the roots have opposite signs; pick the cancellation-free form
    return qb <= 0.0 ? (root - qb) / (2.0 * qa) : -2.0 * qc / (qb + root);
}

std::vector<double> DomainSpec::outer_normal(std::span<const double> x) const {
    std::vector<double> nu(center_.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        nu[i] = (x[i] - center_[i]) / (axes_[i] * axes_[i]);
        norm += nu[i] * nu[i];
    }
    norm = std::sqrt(norm);
    for (auto& v : nu) v /= norm;
    return nu;
}

std::vector<BoundaryPoint> DomainSpec::boundary_mesh(std::size_t count) const {
    const std::size_t n = center_.size();
    const auto units = sphere_points(n, count);
    std::vector<BoundaryPoint> mesh;
    mesh.reserve(count);
    for (const auto& u : units) {
        BoundaryPoint p;
        p.x.resize(n);
        for (std::size_t i = 0; i < n; ++i) p.x[i] = center_[i] + axes_[i] * u[i];
        p.normal = outer_normal(p.x);
        p.phi = phi_.value(p.x);
        auto g = phi_.gradient(p.x);
        double gn = 0.0;
        for (std::size_t i = 0; i < n; ++i) gn += g[i] * p.normal[i];
        for (std::size_t i = 0; i < n; ++i) g[i] -= gn * p.normal[i];
        p.tangential_gradient = std::move(g);
        mesh.push_back(std::move(p));
    }
    return mesh;
}

double DomainSpec::mesh_spacing(std::size_t count) const {
    double mean = 0.0;
    for (double r : axes_) mean += r;
    mean /= static_cast<double>(axes_.size());
    const double dim = static_cast<double>(axes_.size() - 1);
    // surface measure of the sphere of radius `mean`
    const double area = 2.0 * std::pow(std::numbers::pi, (dim + 1) / 2) / std::tgamma((dim + 1) / 2) *
                        std::pow(mean, dim);
    return std::pow(area / static_cast<double>(count), 1.0 / dim);
}

DomainSpec DomainSpec::subtract_linear(std::span<const double> b) const {
    BoundaryData phi = phi_;
    if (phi.linear.empty()) phi.linear.assign(center_.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) phi.linear[i] -= b[i];
    return DomainSpec(center_, axes_, std::move(phi));
}

}  // namespace hessex
