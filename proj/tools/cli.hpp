#pragma once

#include <string>
#include <vector>

namespace folia::cli {

/// Dispatches one subcommand invocation.  Returns the process exit code:
/// 0 success, 1 I/O or schema errors, 2 domain errors.
int run(const std::vector<std::string>& args);

}  // namespace folia::cli
