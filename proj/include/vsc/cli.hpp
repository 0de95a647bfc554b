#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vsc {

/// Entry point of the `vsc` command line tool. `args` excludes the program
/// name. Returns the process exit status: 0 on success, 1 when a command
/// fails at run time, 2 for usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vsc
