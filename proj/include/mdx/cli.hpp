#pragma once

#include <iosfwd>

namespace mdx {

/// Exit codes of the command-line front end.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kBadInput = 2, kNumericalFailure = 3 };

/// Entry point of the `mdx` tool; subcommands rate, check, saddle, simulate,
/// sweep and regvar. Results go to `out` (and --out DIR), diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mdx
