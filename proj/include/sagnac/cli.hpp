#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sagnac::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 2,
    kIoError = 3,
};

/// Runs the command line front end. args[0] is the program name. Results go
/// to `out` unless --output is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sagnac::cli
