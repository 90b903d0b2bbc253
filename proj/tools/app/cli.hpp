#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhxy/errors.hpp"
#include "registry.hpp"

namespace nhxy::app {

inline constexpr const char* version = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numeric = 3, exit_partial_sweep = 4 };

struct RunConfig {
    std::string command;
    json parameters = json::object(); ///< fully resolved, defaults included
    std::string output_dir = "nhxy_out";
    std::uint64_t seed = 0; ///< reserved for randomised initial conditions
    int workers = 1;
    bool gnuplot = false;
};

/// Artifacts of one run, before they are written.
struct RunResult {
    int exit_code = exit_ok;
    json summary = json::object();
    std::vector<std::pair<std::string, std::string>> files; ///< name, contents
    json error; ///< set when the run failed as a whole (null otherwise)
};

/// Parses argv-style arguments (without the program name) into a RunConfig.
/// Throws nhxy::Error of kind config or usage.
[[nodiscard]] RunConfig parse_config(const std::vector<std::string>& args);

/// Loads and validates a JSON config file (strict keys).
[[nodiscard]] json load_config_file(const std::string& path);

/// Executes a resolved configuration without touching the filesystem.
[[nodiscard]] RunResult execute(const RunConfig& cfg);

/// Full command-line entry point: parse, execute, write artifacts and the
/// manifest. Returns the process exit code.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Sweep over a Cartesian grid of parameter values of another command.
[[nodiscard]] RunResult run_sweep(const RunConfig& cfg);

[[nodiscard]] int exit_code_for(ErrorKind kind) noexcept;

} // namespace nhxy::app
