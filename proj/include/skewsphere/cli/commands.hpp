#pragma once

#include <iosfwd>

namespace skewsphere::cli {

enum ExitCode : int { exit_ok = 0, exit_io = 1, exit_invalid = 2, exit_numerical = 3 };

/// Entry point of the `skewsphere` tool. Errors are reported on `err` and
/// mapped to the exit codes above.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace skewsphere::cli
