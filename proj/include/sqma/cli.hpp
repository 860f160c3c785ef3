#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sqma::cli {

enum ExitCode : int {
    kSuccess = 0,     // also the YES-class verdicts
    kNoClass = 1,
    kParseError = 2,
    kCapExceeded = 3,
    kNotPromise = 4,  // promise or precondition violated
};

/// Runs one command. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sqma::cli
