#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace gcnalign {

/// Runs the command-line tool on `args` (program name excluded). Returns 0 on
/// success, 2 on a usage error and 1 when the command itself fails.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace gcnalign
