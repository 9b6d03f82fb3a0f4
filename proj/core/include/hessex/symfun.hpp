#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hessex/errors.hpp"

namespace hessex {

/// Eigenvalue vector, stored in ascending order.
class LambdaVec {
public:
    explicit LambdaVec(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double front() const { return values_.front(); }
    double back() const { return values_.back(); }

private:
    std::vector<double> values_;
};

/// Elementary symmetric polynomial sigma_k over the entries, 1 <= k <= n.
/// Evaluated through the coefficient recurrence of prod(t + lambda_i).
double sigma_k(std::span<const double> lambda, int k);
inline double sigma_k(const LambdaVec& lambda, int k) { return sigma_k(lambda.values(), k); }

/// All of sigma_0 .. sigma_kmax (sigma_0 = 1).
std::vector<double> elementary_symmetric(std::span<const double> lambda, int kmax);

/// sigma_k of the tuple with entry `skip` deleted; sigma_0 = 1 and sigma_{-1} = 0.
double sigma_k_deleted(std::span<const double> lambda, int k, std::size_t skip);

struct ConeSpec {
    enum class Kind { Garding, PositiveOrthant };

    Kind kind = Kind::Garding;
    int k = 1;
    int n = 2;

    static ConeSpec garding(int k, int n);
    static ConeSpec positive_orthant(int n);

    bool operator==(const ConeSpec&) const = default;
};

struct ConeMembership {
    bool inside = false;
    /// min over the defining quantities (sigma_j, j <= k, or lambda_i)
    double margin = 0.0;
    /// 1-based index of the first non-positive defining quantity, 0 if inside
    int failing_index = 0;
};

ConeMembership cone_contains(const ConeSpec& cone, std::span<const double> lambda);

enum class OperatorKind { HessianRoot, HessianQuotientRoot, SpecialLagrangian, Custom };

/// User-supplied operator. Both callables act on unsorted coordinates and
/// must be permutation-symmetric.
struct CustomFunctions {
    std::function<double(std::span<const double>)> value;
    std::function<std::vector<double>(std::span<const double>)> gradient;
    std::string name = "custom";
};

/// A symmetric function f of eigenvalues together with its cone.
///
/// `eval` and `gradient` take coordinates in any order; gradient entry i is
/// the partial with respect to coordinate i of the given vector. Both throw
/// ConeViolation outside the cone.
class SymmetricOperator {
public:
    static SymmetricOperator hessian_root(int k, int n);
    static SymmetricOperator hessian_quotient_root(int k, int l, int n);
    static SymmetricOperator special_lagrangian(double theta, int n);
    static SymmetricOperator custom(int n, ConeSpec cone, CustomFunctions fns);

    OperatorKind kind() const noexcept { return kind_; }
    int dimension() const noexcept { return n_; }
    int k() const noexcept { return k_; }
    int l() const noexcept { return l_; }
    double theta() const noexcept { return theta_; }
    const ConeSpec& cone() const noexcept { return cone_; }

    /// True for the sigma_k and quotient roots (degree-one homogeneous).
    bool homogeneous() const noexcept {
        return kind_ == OperatorKind::HessianRoot || kind_ == OperatorKind::HessianQuotientRoot;
    }

    std::string describe() const;

    bool admissible(std::span<const double> lambda) const { return cone_contains(cone_, lambda).inside; }

    double eval(std::span<const double> lambda) const;
    double eval(const LambdaVec& lambda) const { return eval(lambda.values()); }

    std::vector<double> gradient(std::span<const double> lambda) const;
    std::vector<double> gradient(const LambdaVec& lambda) const { return gradient(lambda.values()); }

    /// Partial derivative with respect to coordinate i only.
    double partial(std::span<const double> lambda, std::size_t i) const;

private:
    SymmetricOperator() = default;
    void require(std::span<const double> lambda) const;

    OperatorKind kind_ = OperatorKind::HessianRoot;
    int n_ = 2;
    int k_ = 1;
    int l_ = 0;
    double theta_ = 0.0;
    ConeSpec cone_{};
    std::shared_ptr<const CustomFunctions> custom_;
};

/// t > 0 with f(t * direction) = target, by bracketed safeguarded Newton.
/// `direction` must lie in the cone.
double solve_on_ray(const SymmetricOperator& op, std::span<const double> direction, double target);

/// a* with f(a*, ..., a*) = 1.
double solve_a_star(const SymmetricOperator& op);

/// lambda(A) . grad f(lambda(A)) / (2 lambda_n(A) d_1 f(lambda(A))) for ascending diagonal entries.
double alpha_of(const SymmetricOperator& op, std::span<const double> a);

struct AValidation {
    bool in_calA = false;
    bool in_scriptA = false;
    double alpha = 0.0;
    double f_value = 0.0;
};

/// Membership of diag(a) in the normalized set (|f - 1| <= 1e-10) and in the
/// subset with alpha > 1. `a` must be strictly positive and ascending.
AValidation validate_A(const SymmetricOperator& op, std::span<const double> a);

/// Rescales positive ascending entries onto f = 1.
std::vector<double> normalize_onto_level(const SymmetricOperator& op, std::span<const double> a);

struct ConditionResult {
    bool pass = true;
    double worst_margin = 0.0;
    std::size_t samples = 0;
    std::size_t failures = 0;
    std::string note;
};

struct StructureReport {
    std::uint64_t seed = 0;
    std::size_t cone_samples = 0;
    double inf_g = 0.0;
    double sup_g = 0.0;

    ConditionResult monotone;
    ConditionResult boundary_condition;
    ConditionResult nu_condition;
    ConditionResult max_partial;
    ConditionResult r_shift;
    ConditionResult concavity_sampled;

    std::string nu_description;
    bool nu_heuristic = false;
    /// Witness R per positive-orthant sample; negative when the doubling search failed.
    std::vector<double> r_shift_witnesses;
};

struct GBounds {
    double inf_g = 1.0;
    double sup_g = 1.0;
};

/// Samples the cone (seeded) and evaluates every structure condition.
/// Findings are report fields; nothing here throws on a failed condition.
StructureReport check_structure(const SymmetricOperator& op, std::uint64_t seed, GBounds g_bounds,
                                std::size_t sample_count = 256);

}  // namespace hessex
