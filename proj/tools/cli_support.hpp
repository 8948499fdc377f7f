#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace infoplane::cli {

/// "3" -> {3}; "0..4" -> {0,1,2,3,4}; "1,5,9" -> {1,5,9}. Throws ArgumentError.
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

/// Runs the command line and returns the process exit code:
/// 0 success, 1 run failure, 2 argument error.
int run(int argc, char** argv);

}  // namespace infoplane::cli
