#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sprac::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,        // I/O, format or internal errors
    exit_usage = 2,          // invalid flags or values
    exit_unrecovered = 3,    // recovery ran but did not return the originals
};

// Runs the command line `args` (without the program name). Normal output goes
// to `out`; logs and the machine-readable error line go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sprac::cli
