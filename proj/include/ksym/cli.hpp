#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ksym {

/// Command-line front end, callable in-process. `args` excludes the program
/// name. Returns the exit code: 0 when every check passes, 1 when a check or
/// computation fails, 2 on bad input (flags, model file, CSV, dimensions).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ksym
