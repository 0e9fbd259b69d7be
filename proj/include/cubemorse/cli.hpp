#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cubemorse::cli {

enum ExitCode : int { Ok = 0, Usage = 1, Invalid = 2, TooLarge = 3, Internal = 4 };

/// Environment variable holding the default worker count.
inline constexpr const char* kThreadsEnv = "CUBEMORSE_THREADS";

/// Estimated cell count above which --force is required.
inline constexpr double kForceThreshold = 1e9;

/// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cubemorse::cli
