#pragma once

#include <string>
#include <vector>

namespace emperor {

/// Runs the command-line interface on `args` (program name excluded).
/// Returns the process exit code: 0 on success, 1 for usage errors, 2 for
/// data or IO errors.
int run_cli(const std::vector<std::string>& args);

}  // namespace emperor
