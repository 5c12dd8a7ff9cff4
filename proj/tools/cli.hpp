#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netrefine::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes of dispatch().
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,       // bad flags or parameter values
  kIo = 2,          // unreadable/unwritable files, malformed formats, provider failure
  kConstraint = 3,  // shape mismatch, out-of-bounds pixels, violated input preconditions
};

// Runs one command line (without the program name). Diagnostics go to `err`;
// `out` only receives help/version text and metrics without --out.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netrefine::cli
