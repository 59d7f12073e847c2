#pragma once

namespace oswald {

/// Command-line entry point: parses argv, runs one subcommand, writes outputs.
/// Exit codes: 0 success, 2 parameter errors, 3 numerical-gate failures.
int run(int argc, char** argv);

}  // namespace oswald
