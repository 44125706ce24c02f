#pragma once

#include <iosfwd>

namespace memd {

/// Exit statuses of the `memd` tool.
enum ExitStatus : int {
  kExitOk = 0,
  kExitParse = 2,
  kExitConfig = 3,
  kExitNumeric = 4,
};

/// Entry point of the `memd` tool with injectable streams.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace memd
