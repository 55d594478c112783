#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mvsis::cli {

/// Runs one command. `args` excludes the program name. Returns the exit status;
/// failures print a single `error: origin=... kind=... message=...` line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mvsis::cli
