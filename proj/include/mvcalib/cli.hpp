#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mvcalib::cli {

/// Runs one command (`simulate`, `calibrate`, `register`, `unify`, `detect`).
/// `args` excludes the program name. Returns the process exit status:
/// 0 success, 2 usage error, 3 data or format error, 4 numerical error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mvcalib::cli
