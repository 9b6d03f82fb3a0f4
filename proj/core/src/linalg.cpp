#include "hessex/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "hessex/errors.hpp"

namespace hessex {

SymMatrix SymMatrix::identity(std::size_t n) {
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
    SymMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

SymMatrix SymMatrix::outer(std::span<const double> v) {
    SymMatrix m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i; j < v.size(); ++j) m(i, j) = v[i] * v[j];
    return m;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
    if (o.n_ != n_) throw ArgumentError("SymMatrix: dimension mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double SymMatrix::frobenius() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * (*this)(i, j);
    return std::sqrt(s);
}

std::vector<double> eigenvalues_ascending(const SymMatrix& m) {
    const std::size_t n = m.size();
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            a[i * n + j] = m(i, j);
            if (!std::isfinite(a[i * n + j])) throw ArgumentError("eigen_ascending: non-finite entry");
        }
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += at(i, j) * at(i, j);
        return std::sqrt(s);
    };
    const double tol = 1e-12 * m.frobenius();
    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double app = at(p, p), aqq = at(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
                at(p, q) = at(q, p) = 0.0;
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
    std::stable_sort(ev.begin(), ev.end());
    return ev;
}

LambdaVec eigen_ascending(const SymMatrix& m) { return LambdaVec(eigenvalues_ascending(m)); }

SymMatrix hessian_generalized(std::span<const double> a, std::span<const double> x, double u1, double u2) {
    if (a.size() != x.size()) throw ArgumentError("hessian_generalized: dimension mismatch");
    const std::size_t n = a.size();
    SymMatrix h(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) h(i, j) = a[i] * a[j] * x[i] * x[j] * u2 + (i == j ? a[i] * u1 : 0.0);
    return h;
}

SymMatrix hessian_generalized(const AsymptoticTarget& target, std::span<const double> x, double u1, double u2) {
    return hessian_generalized(target.a, x, u1, u2);
}

bool weyl_check(const SymMatrix& a1, const SymMatrix& a2, double slack) {
    if (a1.size() != a2.size()) throw ArgumentError("weyl_check: dimension mismatch");
    const std::size_t n = a1.size();
    const auto l1 = eigenvalues_ascending(a1);
    const auto l2 = eigenvalues_ascending(a2);
    const auto ls = eigenvalues_ascending(a1 + a2);
    const double tol = slack * std::max(1.0, a1.frobenius() + a2.frobenius());
    // 1-based indices i, j as in the classical statement
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 0; j <= n - i; ++j)
            if (ls[i - 1] > l1[i + j - 1] + l2[n - j - 1] + tol) return false;
        for (std::size_t j = 1; j <= i; ++j)
            if (ls[i - 1] < l1[i - j] + l2[j - 1] - tol) return false;
    }
    return true;
}

}  // namespace hessex
