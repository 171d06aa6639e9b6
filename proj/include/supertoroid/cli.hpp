#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace supertoroid {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitOptimizer = 3 };

/// Runs the `supertoroid` command line. `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace supertoroid
