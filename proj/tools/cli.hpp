#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sphgrf::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kIo = 3;

/// Runs the command line (args excludes the program name). Every successful
/// subcommand writes run.json into --out-dir; `replay <run.json>` re-executes
/// it.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sphgrf::cli
