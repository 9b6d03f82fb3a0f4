#include "hessex/cli/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hessex/asympt.hpp"
#include "hessex/barriers.hpp"
#include "hessex/errors.hpp"
#include "hessex/format.hpp"
#include "hessex/parallel.hpp"
#include "hessex/solver.hpp"
#include "json.hpp"

#ifndef HESSEX_VERSION
#define HESSEX_VERSION "unknown"
#endif

namespace hessex::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Problem {
    SymmetricOperator op;
    std::vector<double> a;
    RightHandSide rhs;
    ImplicitContext ctx;
    DomainSpec domain;
    std::vector<double> b;
};

Problem make_problem(const RunConfig& c) {
    auto op = make_operator(c);
    auto a = resolve_a(c, op);
    auto rhs = make_rhs(c);
    auto domain = make_domain(c);
    try {
        ImplicitContext ctx(op, a, rhs);
        return Problem{op, a, rhs, std::move(ctx), std::move(domain), resolve_b(c)};
    } catch (const hessex::ArgumentError& e) {
        throw ConfigError(std::string("problem setup: ") + e.what());
    }
}

void write_text(const RunConfig& c, const std::string& name, const std::string& text) {
    fs::create_directories(c.output_dir);
    std::ofstream out(fs::path(c.output_dir) / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + (fs::path(c.output_dir) / name).string() + "'");
    out << text;
}

void write_json(const RunConfig& c, const std::string& name, const json& j) { write_text(c, name, j.dump(2) + "\n"); }

void write_timing(const RunConfig& c, const std::string& stage, std::chrono::steady_clock::time_point t0) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_json(c, "timings_" + stage + ".json", {{"stage", stage}, {"seconds", secs}});
}

json condition_json(const ConditionResult& r) {
    return {{"pass", r.pass},
            {"worst_margin", r.worst_margin},
            {"samples", r.samples},
            {"failures", r.failures},
            {"note", r.note}};
}

json fit_json(const std::string& name, const BarrierProfile& p) {
    json j{{"profile", name}};
    try {
        const auto f = fit_profile_decay(p);
        j["exponent"] = f.exponent;
        j["raw_slope"] = f.raw_slope;
        j["log_correction"] = f.log_correction;
        j["s_lo"] = f.s_lo;
        j["s_hi"] = f.s_hi;
        j["residual"] = f.residual;
        j["points"] = f.points;
    } catch (const hessex::Error& e) {
        j["error"] = e.what();
    }
    return j;
}

json check_json(const InequalityCheck& ch) {
    return {{"samples", ch.samples},
            {"failures", ch.failures},
            {"cone_failures", ch.cone_failures},
            {"worst_margin", ch.worst_margin},
            {"worst_point", ch.worst_point}};
}

json splice_json(const SpliceReport& r) {
    return {{"c", r.c},
            {"c_star", r.c_star},
            {"xi1", r.xi1},
            {"xi2", r.xi2},
            {"eta1", r.eta1},
            {"eta2", r.eta2},
            {"delta", r.delta},
            {"zeta1", r.zeta1},
            {"zeta2", r.zeta2},
            {"s1", r.s1},
            {"s2", r.s2},
            {"r1", r.r1},
            {"r2", r.r2},
            {"s_bar", r.s_bar},
            {"sub_splice_inner", r.sub_splice_inner},
            {"sub_splice_outer", r.sub_splice_outer},
            {"super_splice_inner", r.super_splice_inner},
            {"super_splice_outer", r.super_splice_outer},
            {"super_boundary_margin", r.super_boundary_margin},
            {"far_field_mismatch", r.far_field_mismatch},
            {"sandwich_margin", r.sandwich_margin},
            {"sandwich_samples", r.sandwich_samples},
            {"ok", r.ok}};
}

json solve_json(const SolveReport& r) {
    return {{"mode", r.mode},
            {"unknowns", r.unknowns},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"residual", r.residual},
            {"last_update", r.last_update},
            {"residual_history", r.residual_history},
            {"lower_margin", r.lower_margin},
            {"upper_margin", r.upper_margin},
            {"boundary_error", r.boundary_error},
            {"far_constant", r.far_constant},
            {"far_constant_std", r.far_constant_std},
            {"far_nodes", r.far_nodes},
            {"cone_frozen", r.cone_frozen},
            {"step_halvings", r.step_halvings},
            {"monotonicity_violations", r.monotonicity_violations},
            {"stencil_fallbacks", r.stencil_fallbacks}};
}

struct OperatorCheck {
    json doc;
    bool ok = false;
};

OperatorCheck check_operator(const RunConfig& c, const Problem& P) {
    OperatorCheck out;
    json& j = out.doc;
    j["stage"] = "check_operator";
    j["operator"] = P.op.describe();
    j["a"] = P.a;
    const auto v = validate_A(P.op, P.a);
    j["validation"] = {{"in_calA", v.in_calA}, {"in_scriptA", v.in_scriptA}, {"alpha", v.alpha}, {"f_value", v.f_value}};
    const auto rep = check_structure(P.op, c.seed, {P.rhs.inf_g(), P.rhs.sup_g()}, c.barriers.structure_samples);
    const bool waive_r_shift = P.rhs.inf_g() >= 1.0;
    j["structure"] = {{"monotone", condition_json(rep.monotone)},
                      {"boundary_condition", condition_json(rep.boundary_condition)},
                      {"nu_condition", condition_json(rep.nu_condition)},
                      {"max_partial", condition_json(rep.max_partial)},
                      {"r_shift", condition_json(rep.r_shift)},
                      {"concavity_sampled", condition_json(rep.concavity_sampled)},
                      {"nu_description", rep.nu_description},
                      {"nu_heuristic", rep.nu_heuristic},
                      {"inf_g", rep.inf_g},
                      {"sup_g", rep.sup_g},
                      {"cone_samples", rep.cone_samples},
                      {"r_shift_waived", waive_r_shift}};
    std::vector<std::string> failed;
    auto need = [&](const char* name, bool pass) {
        if (!pass) failed.push_back(name);
    };
    need("monotone", rep.monotone.pass);
    need("boundary_condition", rep.boundary_condition.pass);
    need("nu_condition", rep.nu_condition.pass);
    need("max_partial", rep.max_partial.pass);
    if (!waive_r_shift) need("r_shift", rep.r_shift.pass);
    need("in_calA", v.in_calA);
    need("in_scriptA", v.in_scriptA);
    try {
        P.rhs.validate(P.a, c.seed);
        j["rhs_envelope"] = {{"pass", true}};
    } catch (const hessex::Error& e) {
        j["rhs_envelope"] = {{"pass", false}, {"note", e.what()}};
        failed.push_back("rhs_envelope");
    }
    j["failed"] = failed;
    out.ok = failed.empty();
    j["ok"] = out.ok;
    return out;
}

std::string failed_list(const json& doc) {
    std::string s;
    for (const auto& f : doc["failed"]) s += (s.empty() ? "" : ", ") + f.get<std::string>();
    return s;
}

ConstructionOptions construction_options(const RunConfig& c) {
    ConstructionOptions co;
    co.boundary_points = c.barriers.boundary_points;
    co.region_samples = c.barriers.region_samples;
    co.level_samples = c.barriers.level_samples;
    co.s_bar_directions = c.barriers.s_bar_directions;
    co.zeta2_safety = c.barriers.zeta2_safety;
    co.profile.s_max_factor = c.barriers.s_max_factor;
    return co;
}

json setup_json(const BarrierSetup& st) {
    return {{"a", st.a},
            {"s0", st.s0},
            {"s1", st.s1},
            {"s2", st.s2},
            {"alpha", st.alpha},
            {"K", st.K},
            {"phi_max", st.phi_max},
            {"m", st.m},
            {"level_s1_min_barrier", st.level_s1_min_barrier},
            {"level_s2_max_barrier", st.level_s2_max_barrier},
            {"C_bar", st.C_bar},
            {"c_star_sub", st.c_star_sub},
            {"quadratic_super", st.quadratic_super},
            {"c_star_super", st.c_star_super},
            {"eta2", st.eta2},
            {"delta", st.delta},
            {"alpha_delta", st.alpha_delta},
            {"mu_bar", st.mu_bar},
            {"mu_bar_error", st.mu_bar_error},
            {"s_bar", st.s_bar ? json(st.s_bar->s_bar) : json(nullptr)},
            {"s_bar_direct_margin", st.s_bar ? json(st.s_bar->direct_margin) : json(nullptr)},
            {"s_hat", st.s_hat},
            {"r1", st.r1},
            {"r2", st.r2},
            {"a_tilde", st.a_tilde},
            {"zeta2", st.zeta2},
            {"zeta2_root", st.zeta2_root},
            {"boundary_barrier_min_margin", st.barriers->min_margin},
            {"c_star", st.c_star}};
}

}  // namespace

RunConfig apply_overrides(RunConfig config, const Overrides& o) {
    if (o.out) config.output_dir = *o.out;
    if (o.seed) config.seed = *o.seed;
    if (!o.c.empty()) config.c = o.c;
    return config;
}

int cmd_check_operator(const RunConfig& c, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto P = make_problem(c);
    const auto chk = check_operator(c, P);
    write_json(c, kCheckOperatorFile, chk.doc);
    write_text(c, kConfigEchoFile, emit_config(c));
    write_timing(c, "check_operator", t0);
    if (chk.ok) {
        log << "check-operator: all required conditions pass for " << P.op.describe() << "\n";
        return kExitOk;
    }
    log << "check-operator: failed: " << failed_list(chk.doc) << "\n";
    return kExitFailure;
}

int cmd_build_barriers(const RunConfig& c, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto P = make_problem(c);
    write_text(c, kConfigEchoFile, emit_config(c));
    json j{{"stage", "build_barriers"}};
    const auto chk = check_operator(c, P);
    j["operator_check_ok"] = chk.ok;
    auto finish = [&](int code) {
        j["ok"] = code == kExitOk;
        write_json(c, kBarriersFile, j);
        write_timing(c, "build_barriers", t0);
        return code;
    };
    if (!chk.ok) {
        j["error"] = "operator check failed: " + failed_list(chk.doc);
        log << "build-barriers: " << j["error"].get<std::string>() << "\n";
        return finish(kExitFailure);
    }
    std::optional<BarrierSetup> setup;
    try {
        setup = prepare_barriers(P.ctx, P.domain, construction_options(c));
    } catch (const hessex::Error& e) {
        j["error"] = e.what();
        log << "build-barriers: construction failed: " << e.what() << "\n";
        return finish(kExitFailure);
    }
    const auto& st = *setup;
    j["setup"] = setup_json(st);
    json profiles = json::array(), fits = json::array();
    if (st.super_profile) {
        write_text(c, "super_profile.csv", profile_csv(*st.super_profile));
        profiles.push_back("super_profile.csv");
        fits.push_back(fit_json("super", *st.super_profile));
    }
    if (st.radial_profile) {
        write_text(c, "radial_profile.csv", profile_csv(*st.radial_profile));
        profiles.push_back("radial_profile.csv");
        fits.push_back(fit_json("radial", *st.radial_profile));
    }
    j["profiles"] = profiles;
    j["decay_fits"] = fits;

    const std::vector<double> ladder = c.c.empty() ? std::vector<double>{st.c_star + 1.0} : c.c;
    const auto points = exterior_samples(P.domain, P.a, 10.0 * st.r2, c.barriers.verify_samples);
    json rungs = json::array();
    bool all_ok = true;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const double cv = ladder[i];
        json r{{"c", cv}};
        try {
            const auto sb = build_barriers(P.ctx, P.domain, st, cv, c.barriers.verify_samples);
            const std::string sub_csv = "sub_profile_" + std::to_string(i) + ".csv";
            write_text(c, sub_csv, profile_csv(sb.sub.profile()));
            r["sub_profile"] = sub_csv;
            r["sub_decay_fit"] = fit_json("sub", sb.sub.profile());
            const auto sub = verify_subsolution(P.ctx, sb.sub, points, c.tolerances.certificate);
            const auto sup = verify_supersolution(P.ctx, sb.super, points, st.s_hat, c.tolerances.certificate);
            const bool ok = sb.report.ok && sub.failures == 0 && sup.failures == 0 &&
                            sb.report.sandwich_margin >= -c.tolerances.sandwich;
            r["status"] = ok ? "ok" : "margin_failure";
            r["splice"] = splice_json(sb.report);
            r["sub_certificate"] = check_json(sub);
            r["super_certificate"] = check_json(sup);
            all_ok = all_ok && ok;
            log << "build-barriers: c = " << format_double(cv) << (ok ? " ok" : " margin failure") << "\n";
        } catch (const hessex::Error& e) {
            r["status"] = "infeasible";
            r["error"] = e.what();
            all_ok = false;
            log << "build-barriers: c = " << format_double(cv) << " infeasible: " << e.what() << "\n";
        }
        rungs.push_back(r);
    }
    j["ladder"] = rungs;
    log << "build-barriers: c_star = " << format_double(st.c_star) << "\n";
    return finish(all_ok ? kExitOk : kExitFailure);
}

namespace {

double half_quad(const std::vector<double>& a, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += 0.5 * a[i] * x[i] * x[i];
    return s;
}

std::string field_csv_with_linear(Full3DSolution sol, const std::vector<double>& b) {
    for (std::size_t id = 0; id < sol.grid.size(); ++id) {
        if (std::isnan(sol.u[id])) continue;
        const auto x = sol.grid.position(id);
        for (std::size_t i = 0; i < 3; ++i) sol.u[id] += b[i] * x[i];
    }
    return full3d_field_csv(sol);
}

}  // namespace

int cmd_solve(const RunConfig& c, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto P = make_problem(c);
    const std::size_t n = P.a.size();
    const bool symmetric = symmetric_reduction_applies(P.ctx, P.domain);
    std::string mode = c.solver.mode;
    if (mode == "auto") mode = symmetric ? "radial" : "full3d";
    if (mode == "radial" && !symmetric)
        throw ConfigError("solver.mode radial needs A = a* I, a centered ball, constant phi - b.x and radial g");
    if (mode == "full3d" && n != 3) throw ConfigError("solver.mode full3d needs dimension 3");
    write_text(c, kConfigEchoFile, emit_config(c));

    json j{{"stage", "solve"}, {"mode", mode}, {"barriers", symmetric ? "radial" : "spliced"}};
    auto finish = [&](int code) {
        j["ok"] = code == kExitOk;
        write_json(c, kSolveFile, j);
        write_timing(c, "solve", t0);
        return code;
    };

    std::optional<BarrierSetup> setup;
    auto need_setup = [&]() -> const BarrierSetup& {
        if (!setup) setup = prepare_barriers(P.ctx, P.domain, construction_options(c));
        return *setup;
    };
    std::vector<double> ladder = c.c;
    if (ladder.empty()) {
        try {
            ladder = {need_setup().c_star + 1.0};
        } catch (const hessex::Error& e) {
            j["error"] = std::string("no c given and c_star unavailable: ") + e.what();
            log << "solve: " << j["error"].get<std::string>() << "\n";
            return finish(kExitFailure);
        }
    }

    RadialOptions ro;
    ro.nodes = c.solver.radial_nodes;
    ro.s_outer_factor = c.solver.s_outer_factor;
    ro.residual_tol = c.tolerances.residual;
    Full3DOptions fo;
    fo.points = c.solver.grid_points;
    fo.half_width = c.solver.half_width;
    fo.update_tol = c.tolerances.update;
    fo.max_iterations = c.solver.max_iterations;
    fo.relaxation = c.solver.relaxation;
    ProfileOptions po;
    po.s_max_factor = c.barriers.s_max_factor;
    const auto& a = P.a;

    json rungs = json::array();
    bool all_ok = true;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const double cv = ladder[i];
        json r{{"c", cv}};
        const std::string csv_name = "field_" + std::to_string(i) + ".csv";
        try {
            SolveReport rep;
            if (symmetric) {
                const auto rb = radial_barriers(P.ctx, P.domain, cv, po);
                RadialFn lower = [&](double s) { return rb.sub.u(s); };
                RadialFn upper = [&](double s) { return rb.super.u(s); };
                const double phi = rb.sub.first();
                const auto rad = solve_radial(P.ctx, rb.s_boundary, phi, lower, upper, ro);
                if (mode == "radial") {
                    rep = rad.report;
                    write_text(c, csv_name, radial_field_csv(rad));
                } else {
                    FieldFn lo = [&](std::span<const double> x) { return lower(half_quad(a, x)); };
                    FieldFn up = [&](std::span<const double> x) { return upper(half_quad(a, x)); };
                    FieldFn outer = [&](std::span<const double> x) { return rad.at(half_quad(a, x)); };
                    auto sol = solve_full3d(P.ctx, P.domain, lo, up, outer, fo);
                    rep = sol.report;
                    r["radial_reference"] = solve_json(rad.report);
                    write_text(c, csv_name, field_csv_with_linear(std::move(sol), P.b));
                }
            } else {
                const auto sb = build_barriers(P.ctx, P.domain, need_setup(), cv, c.barriers.verify_samples);
                FieldFn lo = [&](std::span<const double> x) { return sb.sub.value(x); };
                FieldFn up = [&](std::span<const double> x) { return sb.super.value(x); };
                auto sol = solve_full3d(P.ctx, P.domain, lo, up, up, fo);
                rep = sol.report;
                write_text(c, csv_name, field_csv_with_linear(std::move(sol), P.b));
            }
            const bool ok = rep.converged && rep.lower_margin >= -c.tolerances.sandwich &&
                            rep.upper_margin >= -c.tolerances.sandwich;
            r["status"] = ok ? "ok" : "not_converged";
            r["report"] = solve_json(rep);
            r["field_csv"] = csv_name;
            all_ok = all_ok && ok;
            log << "solve: c = " << format_double(cv) << " " << mode << (ok ? " converged" : " failed")
                << ", residual " << format_double(rep.residual) << ", far constant "
                << format_double(rep.far_constant) << "\n";
        } catch (const hessex::Error& e) {
            r["status"] = "infeasible";
            r["error"] = e.what();
            all_ok = false;
            log << "solve: c = " << format_double(cv) << " infeasible: " << e.what() << "\n";
        }
        rungs.push_back(r);
    }
    j["ladder"] = rungs;
    return finish(all_ok ? kExitOk : kExitFailure);
}

int cmd_report(const RunConfig& c, std::ostream& log) {
    const fs::path dir(c.output_dir);
    const std::vector<std::pair<std::string, std::string>> stages{
        {"check_operator", kCheckOperatorFile}, {"build_barriers", kBarriersFile}, {"solve", kSolveFile}};
    std::vector<std::string> missing;
    json j{{"tool", "hessex"}, {"version", HESSEX_VERSION}};
    j["config"] = json::parse(emit_config(c));
    bool all_ok = true;
    for (const auto& [stage, file] : stages) {
        std::ifstream in(dir / file, std::ios::binary);
        if (!in) {
            missing.push_back(stage);
            continue;
        }
        try {
            j[stage] = json::parse(in);
        } catch (const json::parse_error&) {
            missing.push_back(stage + " (unreadable)");
            continue;
        }
        all_ok = all_ok && j[stage].value("ok", false);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        log << "report: missing stages: " << list << "\n";
        return kExitFailure;
    }
    std::vector<std::string> csv;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".csv") csv.push_back(e.path().filename().string());
    std::sort(csv.begin(), csv.end());
    j["csv"] = csv;
    j["all_ok"] = all_ok;
    write_json(c, kReportFile, j);
    log << "report: wrote " << (dir / kReportFile).string() << (all_ok ? "" : " (some stages failed)") << "\n";
    return kExitOk;
}

}  // namespace hessex::cli
