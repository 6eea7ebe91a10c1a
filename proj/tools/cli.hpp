#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace morsegpe::cli {

// Exit statuses.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kParameterError = 2,
  kNoBoundState = 3,
  kNoThreshold = 4,
  kIntegratorFailure = 5,
  kSolverFailure = 6,
  kIoError = 7,
};

// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "MORSEGPE_OUT_DIR";

// Runs the tool on `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace morsegpe::cli
