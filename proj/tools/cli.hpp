#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace anorand::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// Runs the command line `args` (without the program name). Returns the
// process exit code: 0 on success, 1 on a runtime or validation failure,
// 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace anorand::cli
