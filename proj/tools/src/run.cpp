#include <iostream>

#include "CLI11.hpp"
#include "hessex/cli/commands.hpp"
#include "hessex/errors.hpp"
#include "hessex/parallel.hpp"

namespace hessex::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Barrier construction and exterior Dirichlet solver for Hessian-type equations", "hessex"};
    app.require_subcommand(1, 1);
    std::string config_path;
    Overrides ov;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"check-operator", "verify the structure conditions and the normalization of A"},
        {"build-barriers", "construct and certify the sub- and supersolution for each c"},
        {"solve", "compute the exterior solution between the barriers for each c"},
        {"report", "merge the stage outputs into report.json"}};
    for (const auto& [name, description] : commands) {
        auto* sub = app.add_subcommand(name, description);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", ov.out, "output directory (overrides output_dir)");
        sub->add_option("--threads", ov.threads, "worker cap, 0 = hardware concurrency");
        sub->add_option("--seed", ov.seed, "sampling seed (overrides seed)");
        sub->add_option("--c", ov.c, "far-field constant; repeat for a ladder")->allow_extra_args(false);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        const auto parsed = app.get_subcommands();
        out << (parsed.empty() ? app.help() : parsed.front()->help());
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const RunConfig config = apply_overrides(load_config(config_path), ov);
        set_thread_limit(ov.threads.value_or(config.threads));
        if (command == "check-operator") return cmd_check_operator(config, out);
        if (command == "build-barriers") return cmd_build_barriers(config, out);
        if (command == "solve") return cmd_solve(config, out);
        return cmd_report(config, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const hessex::Error& e) {
        err << command << ": " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace hessex::cli
