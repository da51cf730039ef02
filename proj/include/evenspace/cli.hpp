#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace evenspace::cli {

inline constexpr std::string_view kVersion = "0.1.0";

// Relative --out paths are resolved against this directory when it is set.
inline constexpr const char* kOutDirEnv = "EVENSPACE_OUT_DIR";

enum ExitCode : int { kOk = 0, kAssertionFailed = 1, kUsageError = 2 };

// Runs one command. `args` excludes the program name. Results go to `out`
// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evenspace::cli
