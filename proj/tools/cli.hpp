#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cfrule::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNotConverged = 3;

/// Run the command line front end. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cfrule::cli
