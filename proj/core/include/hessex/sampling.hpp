#pragma once

#include <cstdint>
#include <vector>

namespace hessex {

/// i-th element of the van der Corput sequence in the given prime base.
double radical_inverse(std::uint64_t i, unsigned base);

/// n-dimensional Halton point (first n primes as bases), index i >= 1.
std::vector<double> halton(std::uint64_t i, std::size_t n);

/// Quasi-uniform unit vectors: a Fibonacci lattice for n = 3, a Halton
/// sequence pushed through the inverse normal CDF otherwise.
std::vector<std::vector<double>> sphere_points(std::size_t n, std::size_t count);

/// Points on the ellipsoid {x : (1/2) x^T A x = s} obtained by scaling unit
/// vectors radially.
std::vector<double> onto_level_set(const std::vector<double>& unit, const std::vector<double>& a, double s);

}  // namespace hessex
