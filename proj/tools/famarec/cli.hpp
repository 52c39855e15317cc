#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace famarec::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kUsage = 1,           ///< bad flags or arguments
    kInputError = 2,      ///< unreadable, malformed or inconsistent input
    kNumericalError = 3,  ///< a fit or bootstrap could not be computed
    kInternalError = 4,   ///< I/O failure writing outputs, or any other error
    kReplayMismatch = 5,  ///< replayed outputs differ from the manifest checksums
};

/// Runs the tool. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace famarec::cli
