#pragma once

#include <iosfwd>

namespace glpinn::cli {

/// Runs one command line (argv[0] is the program name). Returns the exit
/// code: 0 on success, 1 on a validation error, 2 on a runtime failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace glpinn::cli
