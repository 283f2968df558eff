#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace iebench {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitConfig = 2, kExitFindings = 3 };

/// Runs one `iebench` invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iebench
