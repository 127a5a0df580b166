#pragma once

// Command-line front end: build, simulate, verify and certify pipelines
// over YAML spec files, with JSON reports and CSV trajectories.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace rnnrat::cli {

inline constexpr const char *kToolVersion = "0.1.0";
inline constexpr const char *kReportSchema = "rnnrat.report/1";
/// Environment variable holding the log level (trace, debug, info, warn, error, off).
inline constexpr const char *kLogEnv = "RNNRAT_LOG";

enum ExitCode : int {
    kOk = 0,
    kOtherError = 1,
    kParseError = 2,      // unreadable or invalid spec, bad arguments
    kSimulationError = 3, // divergence, singularity, failed numeric verification
    kCertificationFailure = 4,
};

struct RunConfig {
    std::string subcommand;
    std::string input;
    double horizon = 5.0;
    double step = 1e-3;
    double tol_embedding = 1e-6;
    double tol_closed_form = 1e-6;
    double tol_fd = 1e-4;
    std::size_t depth_cap = 0;         // 0: system dimension
    std::size_t bracket_depth_cap = 0; // 0: system dimension
    std::size_t num_points = 8;
    std::uint64_t seed = 0;
    std::size_t term_budget = 100000;
    std::string out_dir = "rnnrat-out";
};

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string &bytes);

} // namespace rnnrat::cli
