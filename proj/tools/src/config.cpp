#include "hessex/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "hessex/errors.hpp"
#include "json.hpp"

namespace hessex::cli {

using nlohmann::json;

namespace {

/// Reads the fields of one JSON object and rejects keys nobody asked for.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(where() + ": expected an object");
    }
    ~Reader() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(where() + ": unknown key '" + it.key() + "'");
    }

    template <class T>
    void field(const char* key, T& out) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) return;
        try {
            check_type(*it, out);
            out = it->get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where() + "." + key + ": wrong type");
        }
    }

    template <class Fn>
    void object(const char* key, Fn&& fn) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) return;
        Reader sub(*it, path_ + "." + key);
        fn(sub);
    }

private:
    std::string where() const { return path_.empty() ? "config" : path_; }

    template <class T>
    static void check_type(const json& v, const T&) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw json::type_error::create(302, "bool", &v);
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw json::type_error::create(302, "string", &v);
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw json::type_error::create(302, "number", &v);
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw json::type_error::create(302, "integer", &v);
            if (std::is_unsigned_v<T> && v.get<long long>() < 0) throw json::type_error::create(302, "unsigned", &v);
        } else {
            if (!v.is_array()) throw json::type_error::create(302, "array", &v);
            for (const auto& e : v)
                if (!e.is_number()) throw json::type_error::create(302, "number", &e);
        }
    }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    RunConfig c;
    {
        Reader r(doc, "");
        r.object("operator", [&](Reader& o) {
            o.field("kind", c.op.kind);
            o.field("k", c.op.k);
            o.field("l", c.op.l);
            o.field("theta", c.op.theta);
        });
        r.field("dimension", c.dimension);
        r.field("a", c.a);
        r.field("normalize_a", c.normalize_a);
        r.field("b", c.b);
        r.field("c", c.c);
        r.object("domain", [&](Reader& o) {
            o.field("center", c.domain.center);
            o.field("semi_axes", c.domain.semi_axes);
            o.field("phi_constant", c.domain.phi_constant);
            o.field("phi_linear", c.domain.phi_linear);
            o.field("phi_quadratic", c.domain.phi_quadratic);
        });
        r.object("rhs", [&](Reader& o) {
            o.field("form", c.rhs.form);
            o.field("c0", c.rhs.c0);
            o.field("beta", c.rhs.beta);
            o.field("s0", c.rhs.s0);
            o.field("amplitude", c.rhs.amplitude);
            o.field("omega", c.rhs.omega);
            o.field("s_nodes", c.rhs.s_nodes);
            o.field("g_nodes", c.rhs.g_nodes);
        });
        r.object("tolerances", [&](Reader& o) {
            o.field("certificate", c.tolerances.certificate);
            o.field("sandwich", c.tolerances.sandwich);
            o.field("residual", c.tolerances.residual);
            o.field("update", c.tolerances.update);
        });
        r.object("barriers", [&](Reader& o) {
            o.field("boundary_points", c.barriers.boundary_points);
            o.field("region_samples", c.barriers.region_samples);
            o.field("level_samples", c.barriers.level_samples);
            o.field("s_bar_directions", c.barriers.s_bar_directions);
            o.field("zeta2_safety", c.barriers.zeta2_safety);
            o.field("s_max_factor", c.barriers.s_max_factor);
            o.field("verify_samples", c.barriers.verify_samples);
            o.field("structure_samples", c.barriers.structure_samples);
        });
        r.object("solver", [&](Reader& o) {
            o.field("mode", c.solver.mode);
            o.field("radial_nodes", c.solver.radial_nodes);
            o.field("s_outer_factor", c.solver.s_outer_factor);
            o.field("grid_points", c.solver.grid_points);
            o.field("half_width", c.solver.half_width);
            o.field("max_iterations", c.solver.max_iterations);
            o.field("relaxation", c.solver.relaxation);
        });
        r.field("output_dir", c.output_dir);
        r.field("seed", c.seed);
        r.field("threads", c.threads);
    }
    static const std::set<std::string> kinds{"hessian_root", "hessian_quotient_root", "special_lagrangian"};
    static const std::set<std::string> forms{"constant", "radial", "oscillatory", "tabulated"};
    static const std::set<std::string> modes{"auto", "radial", "full3d"};
    if (!kinds.count(c.op.kind)) throw ConfigError("operator.kind: unknown operator '" + c.op.kind + "'");
    if (!forms.count(c.rhs.form)) throw ConfigError("rhs.form: unknown form '" + c.rhs.form + "'");
    if (!modes.count(c.solver.mode)) throw ConfigError("solver.mode: unknown mode '" + c.solver.mode + "'");
    if (c.dimension < 1 || c.dimension > 16) throw ConfigError("dimension: must lie in [1, 16]");
    const auto n = static_cast<std::size_t>(c.dimension);
    auto sized = [&](const std::vector<double>& v, std::size_t want, const char* name) {
        if (!v.empty() && v.size() != want) {
            std::ostringstream os;
            os << name << ": expected " << want << " entries, got " << v.size();
            throw ConfigError(os.str());
        }
    };
    sized(c.a, n, "a");
    sized(c.b, n, "b");
    sized(c.domain.center, n, "domain.center");
    sized(c.domain.semi_axes, n, "domain.semi_axes");
    sized(c.domain.phi_linear, n, "domain.phi_linear");
    sized(c.domain.phi_quadratic, n * n, "domain.phi_quadratic");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const RunConfig& c) {
    json j;
    j["operator"] = {{"kind", c.op.kind}, {"k", c.op.k}, {"l", c.op.l}, {"theta", c.op.theta}};
    j["dimension"] = c.dimension;
    j["a"] = c.a;
    j["normalize_a"] = c.normalize_a;
    j["b"] = c.b;
    j["c"] = c.c;
    j["domain"] = {{"center", c.domain.center},
                   {"semi_axes", c.domain.semi_axes},
                   {"phi_constant", c.domain.phi_constant},
                   {"phi_linear", c.domain.phi_linear},
                   {"phi_quadratic", c.domain.phi_quadratic}};
    j["rhs"] = {{"form", c.rhs.form},   {"c0", c.rhs.c0},       {"beta", c.rhs.beta},
                {"s0", c.rhs.s0},       {"amplitude", c.rhs.amplitude}, {"omega", c.rhs.omega},
                {"s_nodes", c.rhs.s_nodes}, {"g_nodes", c.rhs.g_nodes}};
    j["tolerances"] = {{"certificate", c.tolerances.certificate},
                       {"sandwich", c.tolerances.sandwich},
                       {"residual", c.tolerances.residual},
                       {"update", c.tolerances.update}};
    j["barriers"] = {{"boundary_points", c.barriers.boundary_points},
                     {"region_samples", c.barriers.region_samples},
                     {"level_samples", c.barriers.level_samples},
                     {"s_bar_directions", c.barriers.s_bar_directions},
                     {"zeta2_safety", c.barriers.zeta2_safety},
                     {"s_max_factor", c.barriers.s_max_factor},
                     {"verify_samples", c.barriers.verify_samples},
                     {"structure_samples", c.barriers.structure_samples}};
    j["solver"] = {{"mode", c.solver.mode},
                   {"radial_nodes", c.solver.radial_nodes},
                   {"s_outer_factor", c.solver.s_outer_factor},
                   {"grid_points", c.solver.grid_points},
                   {"half_width", c.solver.half_width},
                   {"max_iterations", c.solver.max_iterations},
                   {"relaxation", c.solver.relaxation}};
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    return j.dump(2) + "\n";
}

SymmetricOperator make_operator(const RunConfig& c) {
    try {
        if (c.op.kind == "hessian_root") return SymmetricOperator::hessian_root(c.op.k, c.dimension);
        if (c.op.kind == "hessian_quotient_root")
            return SymmetricOperator::hessian_quotient_root(c.op.k, c.op.l, c.dimension);
        return SymmetricOperator::special_lagrangian(c.op.theta, c.dimension);
    } catch (const hessex::ArgumentError& e) {
        throw ConfigError(std::string("operator: ") + e.what());
    }
}

std::vector<double> resolve_a(const RunConfig& c, const SymmetricOperator& op) {
    const auto n = static_cast<std::size_t>(c.dimension);
    if (c.a.empty()) return std::vector<double>(n, solve_a_star(op));
    if (!std::is_sorted(c.a.begin(), c.a.end()) || !(c.a.front() > 0.0))
        throw ConfigError("a: entries must be positive and ascending");
    return c.normalize_a ? normalize_onto_level(op, c.a) : c.a;
}

RightHandSide make_rhs(const RunConfig& c) {
    const auto& r = c.rhs;
    try {
        if (r.form == "constant") return RightHandSide::constant(r.s0);
        if (r.form == "radial") return RightHandSide::radial(r.c0, r.beta, r.s0, r.amplitude);
        if (r.form == "oscillatory") return RightHandSide::oscillatory(r.c0, r.beta, r.s0, r.amplitude, r.omega);
        return RightHandSide::tabulated(r.c0, r.beta, r.s0, r.s_nodes, r.g_nodes);
    } catch (const hessex::ArgumentError& e) {
        throw ConfigError(std::string("rhs: ") + e.what());
    }
}

std::vector<double> resolve_b(const RunConfig& c) {
    return c.b.empty() ? std::vector<double>(static_cast<std::size_t>(c.dimension), 0.0) : c.b;
}

DomainSpec make_domain(const RunConfig& c) {
    const auto n = static_cast<std::size_t>(c.dimension);
    auto center = c.domain.center.empty() ? std::vector<double>(n, 0.0) : c.domain.center;
    auto axes = c.domain.semi_axes.empty() ? std::vector<double>(n, 1.0) : c.domain.semi_axes;
    BoundaryData phi{c.domain.phi_constant, c.domain.phi_linear, c.domain.phi_quadratic};
    try {
        DomainSpec d(std::move(center), std::move(axes), std::move(phi));
        const auto b = resolve_b(c);
        return d.subtract_linear(b);
    } catch (const hessex::ArgumentError& e) {
        throw ConfigError(std::string("domain: ") + e.what());
    }
}

}  // namespace hessex::cli
