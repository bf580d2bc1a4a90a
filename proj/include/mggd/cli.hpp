#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mggd::cli {

// Exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kBadMatrix = 3,
    kNotConverged = 4,
    kDegenerateData = 5,
};

// Runs the command line `args` (without the program name). Errors are
// written to `err` as a single line starting with "error:".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mggd::cli
