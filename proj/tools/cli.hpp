#pragma once

#include <iosfwd>

namespace awarekit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Parses and runs one command. Diagnostics go to `err`, informational output to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace awarekit::cli
