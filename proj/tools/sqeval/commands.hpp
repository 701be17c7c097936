#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sqeval::cli {

/// Runs the sqeval command line. `args` excludes the program name.
/// Returns the process exit code; 0 only if every entry succeeded.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sqeval::cli
