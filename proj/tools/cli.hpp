#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dte::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kUsage = 2,       // bad flags, unreadable or unparseable input
  kDegenerate = 3,  // data for which a metric or alignment is undefined
};

/// Entry point shared by the `dte` executable and the tests. args[0] is the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dte::cli
