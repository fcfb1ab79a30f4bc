#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nkd::cli {

enum ExitCode { kOk = 0, kUsage = 2, kMissingData = 3, kInternal = 4 };

/// Runs one command line (without the program name). Everything the
/// command prints goes to `out` / `err`; files go where the flags say.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nkd::cli
