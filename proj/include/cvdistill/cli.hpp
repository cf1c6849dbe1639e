#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cvdistill {

/// Exit statuses of the command-line front end.
enum ExitStatus : int { kExitOk = 0, kExitInvalid = 1, kExitIo = 2 };

/// Runs the command line `args` (args[0] is the program name). Results go to
/// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Contents of the shipped canonical.json.
const std::string& canonical_config_text();

}  // namespace cvdistill
