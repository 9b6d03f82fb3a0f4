#pragma once

#include <vector>

namespace hessex {

/// Prescribed quadratic behaviour at infinity: u ~ x^T A x / 2 + b.x + c.
/// A is diagonal with ascending entries.
struct AsymptoticTarget {
    std::vector<double> a;
    std::vector<double> b;
    double c = 0.0;

    std::size_t dimension() const noexcept { return a.size(); }
    double a_min() const { return a.front(); }
    double a_max() const { return a.back(); }

    /// s = (1/2) sum a_i x_i^2
    template <class V>
    double s_of(const V& x) const {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * x[i] * x[i];
        return 0.5 * s;
    }
};

}  // namespace hessex
