/**
 * @file cli.hpp
 * @brief Config-driven experiment runner behind the `subvarlap` executable.
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace subvarlap {

inline constexpr const char* kVersion = "0.1.0";

/// Exit status of a run.
enum ExitStatus : int { kExitOk = 0, kExitError = 1, kExitGate = 2 };

/// args excludes the program name.  Writes artifacts plus manifest.json to
/// the output directory; diagnostics go to `err`, short summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace subvarlap
