#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "hessex/symfun.hpp"

namespace hessex {

/// Right-hand side g of f(lambda(D^2 u)) = g outside D, together with the
/// decay envelope 1 - C0 s^{-beta/2} <= g <= 1 + C0 s^{-beta/2} for s >= s0.
///
/// Analytic forms, with S = max(s, s0):
///   constant:     g = 1
///   radial:       g = 1 + C0 amplitude S^{-beta/2}
///   oscillatory:  g = 1 + C0 amplitude cos(omega sum_i x_i) S^{-beta/2}
///   tabulated:    g(s) linear in s between nodes, continued past the last
///                 node as 1 + (g_last - 1)(s_last / s)^{beta/2}
class RightHandSide {
public:
    enum class Form { Constant, Radial, Oscillatory, Tabulated };

    static RightHandSide constant(double s0 = 2.0);
    static RightHandSide radial(double c0, double beta, double s0, double amplitude = 1.0);
    static RightHandSide oscillatory(double c0, double beta, double s0, double amplitude = 1.0, double omega = 1.0);
    static RightHandSide tabulated(double c0, double beta, double s0, std::vector<double> s_nodes,
                                   std::vector<double> g_nodes);

    Form form() const noexcept { return form_; }
    double c0() const noexcept { return c0_; }
    double beta() const noexcept { return beta_; }
    double s0() const noexcept { return s0_; }
    double amplitude() const noexcept { return amplitude_; }
    double omega() const noexcept { return omega_; }
    const std::vector<double>& s_nodes() const noexcept { return s_nodes_; }
    const std::vector<double>& g_nodes() const noexcept { return g_nodes_; }

    /// g depends on s only
    bool is_radial() const noexcept { return form_ != Form::Oscillatory; }

    /// g at point x where s = x^T A x / 2 (s is supplied by the caller).
    double evaluate(std::span<const double> x, double s) const;
    /// g for radial forms
    double radial_value(double s) const;

    /// 1 + C0 max(s, s0)^{-beta/2}
    double g_upper(double s) const;
    /// 1 - C0 max(s, s0)^{-beta/2}
    double g_lower(double s) const;

    /// inf and sup of g outside D, given that D lies inside D_{s0}
    double inf_g() const noexcept { return inf_g_; }
    double sup_g() const noexcept { return sup_g_; }

    /// Sampled check of the envelope on random points with s >= s0.
    /// Throws ArgumentError with the worst offending sample.
    void validate(std::span<const double> a, std::uint64_t seed, std::size_t samples = 2000) const;

private:
    RightHandSide() = default;
    void finish();

    Form form_ = Form::Constant;
    double c0_ = 0.0;
    double beta_ = 3.0;
    double s0_ = 2.0;
    double amplitude_ = 0.0;
    double omega_ = 1.0;
    std::vector<double> s_nodes_, g_nodes_;
    double inf_g_ = 1.0, sup_g_ = 1.0;
};

/// x with f(x, rest...) = target and (x, rest...) in the cone.
///
/// The lower end of the bracket sits just above the cone-exit point of the
/// first coordinate; the upper end starts at `hint` and doubles up to 2^40.
/// Throws StructuralError naming the condition responsible for a missing
/// sign change ("boundary_condition" below, "r_shift" above).
double solve_first_coordinate(const SymmetricOperator& op, std::span<const double> rest, double target,
                              double hint);

/// Cone-exit point inf{x : (x, rest) in cone}; -inf if unbounded.
double cone_exit_first_coordinate(const ConeSpec& cone, std::span<const double> rest);

/// The scalar implicit functions of one (f, A, g) problem:
///   f(w0 a) = g_upper(s)                    f(h, a_2 w, ..., a_n w) = g_upper(s)
///   f(W0 a) = g_lower(s)                    f(H, a_2 w, ..., a_n w) = g_lower(s)
///   f(a~, ..., a~) = inf g                  f(hbar, a~ w, ..., a~ w) = inf g
/// Solves are memoized on the exact bits of their arguments; the cache is
/// mutex-protected and shared between copies, and results never depend on
/// call order.
class ImplicitContext {
public:
    ImplicitContext(SymmetricOperator op, std::vector<double> a, RightHandSide rhs);

    const SymmetricOperator& op() const noexcept { return op_; }
    const std::vector<double>& a() const noexcept { return a_; }
    const RightHandSide& rhs() const noexcept { return rhs_; }

    double w0(double s) const;
    double W0(double s) const;
    /// requires w >= w0(s) when `check_domain`
    double h(double s, double w, bool check_domain = true) const;
    /// requires 0 < w <= W0(s) when `check_domain`
    double H(double s, double w, bool check_domain = true) const;

    /// requires 0 < inf g <= 1
    double a_tilde() const;
    /// f(hbar, a~ w, ..., a~ w) = inf g, w > 0
    double hbar(double w) const;

    std::size_t cache_size() const;
    void clear_cache() const;

private:
    enum class Tag : std::uint8_t { w0, W0, h, H, hbar };
    struct Key {
        Tag tag;
        std::uint64_t s, w;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    template <class Fn>
    double memo(Tag tag, double s, double w, Fn&& compute) const;
    double ray_solve(double target) const;
    double coordinate_solve(double target, double scale, double w, double hint) const;

    SymmetricOperator op_;
    std::vector<double> a_;
    RightHandSide rhs_;
    struct Cache {
        std::mutex mutex;
        std::unordered_map<Key, double, KeyHash> values;
    };
    // shared by copies: they describe the same problem
    std::shared_ptr<Cache> cache_;
    double a_tilde_ = -1.0;
};

}  // namespace hessex
