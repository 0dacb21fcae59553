#pragma once

#include <iosfwd>

namespace recaudit {

// Exit codes of the recaudit command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitEmptyData = 3;
inline constexpr int kExitTraining = 4;

/// Subcommands: prepare, audit, mitigate, report. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace recaudit
