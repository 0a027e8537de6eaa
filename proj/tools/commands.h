#pragma once

#include <string>
#include <vector>

namespace gspart::cli {

// Parses and runs one subcommand. args excludes the program name.
// Returns the process exit code; errors are reported on stderr.
int run(const std::vector<std::string>& args);

}  // namespace gspart::cli
