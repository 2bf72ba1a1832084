#pragma once

namespace opsum::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kCheckFailure = 3 };

/// Parses arguments, runs one subcommand and returns the process exit code.
/// Diagnostics go to stderr; command output goes to --out or stdout.
int run(int argc, const char* const* argv);

}  // namespace opsum::cli
