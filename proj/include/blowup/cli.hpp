#pragma once

/**
 * @file cli.hpp
 * @brief In-process entry point of the blowuplab command line.
 *
 * Exit codes: 0 when every check passes, 1 for invalid input (bad flags,
 * config or parameters), 2 for numerical failure or a failed check.
 */

#include <string>
#include <vector>

namespace blowup::cli {

struct CliResult {
    int exit_code = 0;
    std::string out;  // JSON report or help text
    std::string err;  // diagnostics
};

/// args excludes the program name.
CliResult run(const std::vector<std::string>& args);

}  // namespace blowup::cli
