#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcode::cli {

// Runs one command line (args excludes the program name). Results go to
// `out`, diagnostics to `err` as "E<category>: message". Returns the exit
// code: 0 on success, 1 on a library error, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcode::cli
