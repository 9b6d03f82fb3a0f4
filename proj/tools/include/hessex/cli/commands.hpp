#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hessex/cli/config.hpp"

namespace hessex::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Stage outputs inside the output directory.
inline constexpr const char* kCheckOperatorFile = "check_operator.json";
inline constexpr const char* kBarriersFile = "barriers.json";
inline constexpr const char* kSolveFile = "solve.json";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kConfigEchoFile = "config.json";

/// Command-line overrides applied on top of the config file.
struct Overrides {
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
    std::vector<double> c;
};

/// Applies overrides other than the thread cap, which is an execution
/// resource and does not enter the echoed config.
RunConfig apply_overrides(RunConfig config, const Overrides& o);

int cmd_check_operator(const RunConfig& config, std::ostream& log);
int cmd_build_barriers(const RunConfig& config, std::ostream& log);
int cmd_solve(const RunConfig& config, std::ostream& log);
int cmd_report(const RunConfig& config, std::ostream& log);

/// Full command line: parses flags, loads the config and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hessex::cli
