#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace synapcount::cli {

enum ExitStatus : int {
  kSuccess = 0,
  kUsageError = 1,
  kInputError = 2,
  kRuntimeFailure = 3,
};

/// Runs `synapcount <subcommand> ...`; args[0] is the program name.
/// Subcommands: analyze, preview, batch, serve.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace synapcount::cli
