#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace typlab::cli {

// Command-line driver; writes the formatted report to `out` (or the file
// named by --output) and diagnostics to `err`.  Returns the process exit
// code: 0 success, 2 validation error, 3 numeric/domain error.  Output for
// a fixed argument list is byte-identical across runs.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace typlab::cli
