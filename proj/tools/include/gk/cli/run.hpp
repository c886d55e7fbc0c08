#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gk/cli/config.hpp"

namespace gk::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitConvergence = 2,
    kExitVerification = 3,
};

struct RunResult {
    int exit_code = kExitOk;
    std::vector<std::string> files;  // written, relative to the output directory
    std::vector<std::string> summary;
};

/// Executes `command` with a validated configuration and writes CSV files,
/// a plain-text summary (verify) and manifest.json into config.output.
/// Convergence and verification failures are reported through exit_code;
/// configuration problems throw ConfigError.
RunResult run(const RunConfig& config, Command command, std::size_t jobs = 1);

/// Reads GK_LOG (error, info, debug) and sets the global log level.
void configure_logging();

}  // namespace gk::cli
