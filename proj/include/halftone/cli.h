#ifndef HALFTONE_CLI_H_
#define HALFTONE_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace halftone::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBenchmark = 3;

// Runs the command line `args` (args[0] is the program name). JSON results
// go to `out`, diagnostics to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace halftone::cli

#endif  // HALFTONE_CLI_H_
