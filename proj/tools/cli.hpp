#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace roadtrace::cli {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2 };

// Runs one subcommand. args excludes the program name. Reports go to `out`,
// diagnostics and usage text to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, char** argv);

}  // namespace roadtrace::cli
