#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nlfctn::cli {

/// Runs one command line (without the program name). Returns the process
/// exit code: 0 on success, 1 on runtime errors, CLI11's code on bad usage.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* version();

}  // namespace nlfctn::cli
