#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace schmidtlab {

/// Exit codes of the command-line front end.
enum ExitCode : int { exit_ok = 0, exit_verification_failed = 1, exit_usage = 2 };

/// Runs one `schmidtlab` invocation; argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count for sweeps: SCHMIDTLAB_THREADS if set and positive,
/// otherwise the hardware concurrency.
unsigned worker_count();

}  // namespace schmidtlab
