#pragma once

#include <span>
#include <vector>

#include "hessex/symfun.hpp"
#include "hessex/target.hpp"

namespace hessex {

/// Dense symmetric matrix. Only the upper triangle is stored, so
/// entry(i,j) == entry(j,i) holds by construction.
class SymMatrix {
public:
    explicit SymMatrix(std::size_t n = 0) : n_(n), data_(n * (n + 1) / 2, 0.0) {}

    static SymMatrix identity(std::size_t n);
    static SymMatrix diagonal(std::span<const double> d);
    /// v v^T
    static SymMatrix outer(std::span<const double> v);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[index(i, j)]; }

    SymMatrix& operator+=(const SymMatrix& o);
    SymMatrix& operator*=(double s);
    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

    double trace() const;
    double frobenius() const;

private:
    std::size_t index(std::size_t i, std::size_t j) const noexcept {
        if (i > j) std::swap(i, j);
        return i * n_ - i * (i + 1) / 2 + j;
    }
    std::size_t n_;
    std::vector<double> data_;
};

/// Eigenvalues, ascending, by cyclic Jacobi rotations.
std::vector<double> eigenvalues_ascending(const SymMatrix& m);
LambdaVec eigen_ascending(const SymMatrix& m);

/// Hessian of u(s), s = x^T A x / 2, given u'(s) = u1 and u''(s) = u2:
/// a_i delta_ij u1 + a_i a_j x_i x_j u2.
SymMatrix hessian_generalized(const AsymptoticTarget& target, std::span<const double> x, double u1, double u2);
SymMatrix hessian_generalized(std::span<const double> a, std::span<const double> x, double u1, double u2);

/// Both Weyl inequality families for A1 + A2, with absolute slack `slack`
/// scaled by max(1, |A1| + |A2|):
///   lambda_i(A1+A2) <= lambda_{i+j}(A1) + lambda_{n-j}(A2)
///   lambda_i(A1+A2) >= lambda_{i-j+1}(A1) + lambda_j(A2)
bool weyl_check(const SymMatrix& a1, const SymMatrix& a2, double slack = 1e-10);

}  // namespace hessex
