#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vertalign {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitLimit = 3;

/// Runs one subcommand (fit, build, solve, validate, export, compare, gen).
/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Sets the log level from VERTALIGN_LOG (trace, debug, info, warn, error, off).
void configure_logging();

}  // namespace vertalign
