#ifndef ALO_TOOLS_CLI_H_
#define ALO_TOOLS_CLI_H_

// The `alo` command line. Each subcommand writes its files, prints one JSON
// summary line on `out` and human diagnostics on `err`.

#include <ostream>

namespace alo::cli {

enum ExitCode : int {
  kExitOk = 0,          // success, loading feasible or quality reached
  kExitNotReached = 1,  // quality or feasibility not reached
  kExitUsage = 2,       // bad flags or rejected input values
  kExitIo = 3,          // unreadable, unwritable or malformed files
};

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace alo::cli

#endif  // ALO_TOOLS_CLI_H_
