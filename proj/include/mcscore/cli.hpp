#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mcscore::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitIo = 3,
  kExitDomain = 4,
};

/// Entry point behind the `mcscore` binary. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcscore::cli
