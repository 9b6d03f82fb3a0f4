#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessex/domain.hpp"
#include "hessex/implicit.hpp"
#include "hessex/symfun.hpp"

namespace hessex::cli {

/// Bad config or command line; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OperatorConfig {
    std::string kind = "hessian_root";  // hessian_root | hessian_quotient_root | special_lagrangian
    int k = 3;
    int l = 0;
    double theta = 0.0;
    bool operator==(const OperatorConfig&) const = default;
};

struct DomainConfig {
    std::vector<double> center;     // empty: origin
    std::vector<double> semi_axes;  // empty: unit ball
    double phi_constant = 0.0;
    std::vector<double> phi_linear;
    std::vector<double> phi_quadratic;  // row-major n x n
    bool operator==(const DomainConfig&) const = default;
};

struct RhsConfig {
    std::string form = "constant";  // constant | radial | oscillatory | tabulated
    double c0 = 0.0;
    double beta = 3.0;
    double s0 = 2.0;
    double amplitude = 1.0;
    double omega = 1.0;
    std::vector<double> s_nodes, g_nodes;
    bool operator==(const RhsConfig&) const = default;
};

struct ToleranceConfig {
    double certificate = 1e-8;
    double sandwich = 1e-9;
    double residual = 1e-8;
    double update = 1e-10;
    bool operator==(const ToleranceConfig&) const = default;
};

struct BarrierConfig {
    std::size_t boundary_points = 2000;
    std::size_t region_samples = 20000;
    std::size_t level_samples = 2000;
    std::size_t s_bar_directions = 64;
    double zeta2_safety = 1.1;
    double s_max_factor = 1e6;
    std::size_t verify_samples = 10000;
    std::size_t structure_samples = 256;
    bool operator==(const BarrierConfig&) const = default;
};

struct SolverConfig {
    std::string mode = "auto";  // auto | radial | full3d
    std::size_t radial_nodes = 20001;
    double s_outer_factor = 1e3;
    std::size_t grid_points = 24;
    double half_width = 1.75;
    std::size_t max_iterations = 20000;
    double relaxation = 0.5;
    bool operator==(const SolverConfig&) const = default;
};

/// Every field has a default; the defaults describe the Monge-Ampere
/// benchmark (n = 3, A = a* I, unit ball, phi = 0, g = 1).
struct RunConfig {
    OperatorConfig op;
    int dimension = 3;
    /// diagonal of A, ascending; empty means a* I
    std::vector<double> a;
    /// rescale a onto f(a) = 1
    bool normalize_a = true;
    std::vector<double> b;  // empty: zero
    /// c-ladder; empty means c_star + 1
    std::vector<double> c;
    DomainConfig domain;
    RhsConfig rhs;
    ToleranceConfig tolerances;
    BarrierConfig barriers;
    SolverConfig solver;
    std::string output_dir = "hessex_out";
    std::uint64_t seed = 1;
    unsigned threads = 0;
    bool operator==(const RunConfig&) const = default;
};

/// Strict parse: unknown keys and wrong types are ConfigError.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
/// Canonical JSON with sorted keys and every field present.
std::string emit_config(const RunConfig& config);

/// Objects built from a config.
SymmetricOperator make_operator(const RunConfig& config);
std::vector<double> resolve_a(const RunConfig& config, const SymmetricOperator& op);
RightHandSide make_rhs(const RunConfig& config);
/// Domain with phi - b.x as boundary data.
DomainSpec make_domain(const RunConfig& config);
std::vector<double> resolve_b(const RunConfig& config);

}  // namespace hessex::cli
