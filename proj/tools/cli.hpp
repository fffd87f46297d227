#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace amoebas::cli {

/// Runs one subcommand; `args` excludes the program name. Returns the exit
/// code: 0 on success, 2 for bad input or usage, 3 for numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amoebas::cli
