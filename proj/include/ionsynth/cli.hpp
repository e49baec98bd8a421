#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ionsynth::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailure = 1, kInputError = 2 };

/// Runs one command line (without the program name). Results go to out unless
/// --out/--report name a file; errors are written to err as a single JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ionsynth::cli
