#pragma once

#include <iosfwd>

namespace dipole {

/// dipolelab command line. Exit codes: 0 success, 1 configuration error, 2 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dipole
