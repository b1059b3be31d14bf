#pragma once

#include <iosfwd>

namespace btcmine::cli {

/// Exit codes are a stable contract.
enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kModelRefusal = 3 };

/// Entry point behind the `btcmine` binary: subcommands calc, simulate, analyze.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace btcmine::cli
