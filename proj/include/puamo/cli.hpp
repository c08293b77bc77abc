#pragma once

#include <ostream>

namespace puamo {

/// Entry point of the command-line driver. Exit codes: 0 success, 1 numeric failure,
/// 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace puamo
