#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dcell::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // a check ran and reported FAIL
inline constexpr int kExitUsage = 2;
inline constexpr int kExitParameter = 3;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dcell::cli
