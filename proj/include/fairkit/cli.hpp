#pragma once

namespace fairkit::cli {

/// Command-line entry point. Exit codes: 0 success, 2 input/validation error,
/// 3 configuration error (including unknown flags/subcommands), 4 convergence
/// warning escalated by --strict.
int cli_main(int argc, const char* const* argv);

}  // namespace fairkit::cli
