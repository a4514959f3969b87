#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace formcount::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Runs one command line (args[0] is the program name). Returns 0 on
/// success, 2 on input errors, 3 when an enumeration guard is exceeded.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace formcount::cli
