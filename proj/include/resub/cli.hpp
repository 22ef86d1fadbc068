#pragma once

#include <string>
#include <vector>

namespace resub {

// Full command-line entry point.  argv[0] is the program name.  Returns the
// process exit code: 0 success, 1 usage or input error, 2 infeasible or
// limit-hit solver outcome.
int run_cli(int argc, const char* const* argv);

// Convenience for in-process tests; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace resub
