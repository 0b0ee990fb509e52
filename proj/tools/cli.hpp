#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gcenter/error.hpp"

namespace gcenter::cli {

/// Process exit status for a failure of the given kind.
int exit_code(ErrorKind kind);

inline constexpr int kExitUsage = 2;
inline constexpr int kExitUnexpected = 1;

/// Runs one command line (without the program name). Artifacts go to the
/// output directory; errors are reported on `err` as one JSON object.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace gcenter::cli
