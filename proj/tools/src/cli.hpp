#pragma once

#include <iosfwd>

namespace mcnls::cli {

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kUsageError = 2 };

/// Entry point of the mcnls tool. Output goes to `out` and `err` so tests can
/// drive it in-process.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcnls::cli
