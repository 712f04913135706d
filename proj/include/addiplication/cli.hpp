#pragma once

// Command-line front end: gen-data, train, verify, eval-op.

#include <iosfwd>
#include <string>
#include <vector>

namespace addi::cli {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailure = 1,
  kConfigError = 2,
  kDivergence = 3,
};

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace addi::cli
