#pragma once

#include <string>
#include <vector>

namespace ffp::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kIterationCap = 3,
  kIoError = 4,
};

/// Entry point shared by the `ffp` binary and the CLI tests. `args[0]` is the
/// program name.
int run(const std::vector<std::string> &args);

} // namespace ffp::cli
