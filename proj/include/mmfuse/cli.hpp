#pragma once

#include <iosfwd>

namespace mmfuse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point of the `mmfuse` tool. Subcommands: simulate, process,
/// eval-pose, interact, inspect. Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mmfuse::cli
