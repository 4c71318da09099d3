#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace descfilt::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kOk = 0,
  kAssertionFailure = 1,
  kParseError = 2,
  kInconsistentDynamics = 3,
  kInconsistentData = 4,
  kRegularityViolation = 5,
};

/// Max discrepancy accepted by `compare`.
inline constexpr double kCompareTolerance = 1e-8;

/// Entry point shared by the executable and the tests. args[0] is the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace descfilt::cli
