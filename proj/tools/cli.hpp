#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace crowdmask::cli {

enum ExitCode : int { kOk = 0, kUsageError = 1, kDataError = 2 };

// args excludes the program name. Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace crowdmask::cli
