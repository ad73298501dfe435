#pragma once

#include <ostream>

namespace morsegap {

// Entry point of the command-line tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace morsegap
