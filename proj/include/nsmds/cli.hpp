#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nsmds {

/// Exit codes: 0 success, 1 validation failure, 2 bad input or usage error.
int run_cli(int argc, char** argv);

/// `args` excludes the program name. Reports go to `out` when --out is not
/// given; diagnostics and usage text go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nsmds
