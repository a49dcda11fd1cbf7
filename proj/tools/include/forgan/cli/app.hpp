#pragma once

#include <iosfwd>

namespace forgan::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_config = 2,
    exit_data = 3,
    exit_numeric = 4,
};

/// Parses arguments and runs one subcommand; never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace forgan::cli
