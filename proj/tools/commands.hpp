#pragma once

namespace oobball::cli {

// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kParseError = 2,
  kInvalidPoint = 3,
  kFitFailure = 4,
  kDescriptorMismatch = 5,
};

int run(int argc, char** argv);

}  // namespace oobball::cli
