#include "hessex/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "hessex/errors.hpp"
#include "hessex/parallel.hpp"

namespace hessex {

namespace {

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

std::atomic<unsigned> g_thread_limit{0};

// Acklam's rational approximation, refined by one Halley step
double inverse_normal_cdf(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    double x;
    if (p < 0.02425) {
        const double q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p > 1 - 0.02425) {
        const double q = std::sqrt(-2 * std::log(1 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    }
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
    return x - u / (1 + x * u / 2);
}

}  // namespace

void set_thread_limit(unsigned threads) { g_thread_limit = threads; }

unsigned thread_limit() {
    const unsigned t = g_thread_limit.load();
    if (t > 0) return t;
    return std::max(1u, std::thread::hardware_concurrency());
}

double radical_inverse(std::uint64_t i, unsigned base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

std::vector<double> halton(std::uint64_t i, std::size_t n) {
    if (n > std::size(kPrimes)) throw ArgumentError("halton: dimension too large");
    std::vector<double> p(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = radical_inverse(i, kPrimes[k]);
    return p;
}

std::vector<std::vector<double>> sphere_points(std::size_t n, std::size_t count) {
    std::vector<std::vector<double>> pts;
    pts.reserve(count);
    if (n == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t i = 0; i < count; ++i) {
            const double z = 1.0 - (2.0 * i + 1.0) / static_cast<double>(count);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * static_cast<double>(i);
            pts.push_back({r * std::cos(phi), r * std::sin(phi), z});
        }
        return pts;
    }
    if (n == 2) {
        for (std::size_t i = 0; i < count; ++i) {
            const double phi = 2.0 * std::numbers::pi * (i + 0.5) / static_cast<double>(count);
            pts.push_back({std::cos(phi), std::sin(phi)});
        }
        return pts;
    }
    for (std::size_t i = 1; pts.size() < count; ++i) {
        auto h = halton(i, n);
        double norm = 0.0;
        for (auto& v : h) {
            v = inverse_normal_cdf(std::clamp(v, 1e-12, 1.0 - 1e-12));
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm < 1e-8) continue;
        for (auto& v : h) v /= norm;
        pts.push_back(std::move(h));
    }
    return pts;
}

std::vector<double> onto_level_set(const std::vector<double>& unit, const std::vector<double>& a, double s) {
    double q = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) q += a[i] * unit[i] * unit[i];
    const double scale = std::sqrt(2.0 * s / q);
    std::vector<double> x(unit);
    for (auto& v : x) v *= scale;
    return x;
}

}  // namespace hessex
