#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sandwich::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kInsufficientData = 3,
  kIngestion = 4,
};

/// Runs the command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sandwich::cli
