#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spectra_lab::cli {

/// Runs one command line (without the program name) and returns the process
/// exit status: 0 success, 1 numerical or pipeline failure, 2 configuration or
/// input failure.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace spectra_lab::cli
