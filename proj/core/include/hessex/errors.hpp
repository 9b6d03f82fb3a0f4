#pragma once

#include <stdexcept>
#include <string>

namespace hessex {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad caller input: out-of-range index, non-finite entry, wrong dimension.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// An eigenvalue vector left the admissibility cone.
class ConeViolation : public Error {
public:
    ConeViolation(const std::string& what, int failing_index)
        : Error(what), failing_index_(failing_index) {}

    /// 1-based index j of the first defining quantity that is not positive
    /// (sigma_j for a Garding cone, lambda_j for the positive orthant).
    int failing_index() const noexcept { return failing_index_; }

private:
    int failing_index_;
};

/// A structure condition required by a construction does not hold.
class StructuralError : public Error {
public:
    StructuralError(const std::string& condition, const std::string& what)
        : Error(condition + ": " + what), condition_(condition) {}

    const std::string& condition() const noexcept { return condition_; }

private:
    std::string condition_;
};

/// No t > 0 with f(t, ..., t) = target was bracketed.
class NormalizationError : public Error {
public:
    using Error::Error;
};

/// Input outside the domain of an implicitly defined function.
class DomainError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Decay-rate fits or threshold searches that contradict the asymptotic premises.
class AsymptoticsError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

/// A splicing inequality could not be satisfied within the search budget.
class SpliceFailure : public Error {
public:
    using Error::Error;
};

/// Boundary barrier construction failed for some boundary point.
class BarrierFailure : public Error {
public:
    using Error::Error;
};

}  // namespace hessex
