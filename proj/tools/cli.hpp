#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace typegen {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitInput = 2, kExitBackend = 3 };

/// Runs the command line `args` (without the program name) and returns the
/// exit code. Results go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace typegen
