#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geoprint::cli {

enum ExitCode { Ok = 0, Invalid = 1, Io = 2 };

/// Runs one command line (args[0] is the program name). Human-readable output goes to `out`,
/// error messages to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geoprint::cli
