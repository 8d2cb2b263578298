#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ricf::cli {

enum ExitCode : int {
  ok = 0,
  failure = 1,
  usage = 2,
  parse = 3,
  model_class = 4,
  not_positive_definite = 5,
  max_cycles = 6,
  divergence = 7,
};

/// Subcommands: check, fit, simulate, benchmark. `args` excludes the program
/// name. Errors are reported on `err` as one line `error: <kind>: <message>`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ricf::cli
