#pragma once

// Command-line front end: check, qual, oracle and generate subcommands.

#include <ostream>

namespace statcert::cli {

/// Exit codes: 0 success (any verdict), 1 internal error or audit violation,
/// 2 parse error, 3 infeasible point or violated assumption, 4 cap exceeded.
int runCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace statcert::cli
