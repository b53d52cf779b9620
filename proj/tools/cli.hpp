#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace safs::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

// Runs one subcommand. args excludes the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace safs::cli
