#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fexp/session.hpp"

namespace fexp {

enum ExitCode : int {
    exit_ok = 0,
    exit_violations = 1,
    exit_input = 2,
    exit_precondition = 3,
    exit_invariant = 4,
};

struct CommandResult {
    int exit_code = exit_ok;
    std::string report;             // plain text ending in key=value lines
    std::optional<Session> output;  // artifact for --out
};

const std::vector<std::string>& command_names();

// Never throws: engine errors become exit codes 2-4 with an error report.
CommandResult run_command(const std::string& name, const Session& session);

}  // namespace fexp
