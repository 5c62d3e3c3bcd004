#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pmwls::cli {

enum ExitCode : int { ok = 0, numerical_failure = 1, validation_failure = 2 };

/// Runs `pmwls <command> ...`. args[0] is the program name. Human-readable summaries
/// go to `out`, usage and diagnostics to `err`; data only ever goes to files named by flags.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pmwls::cli
