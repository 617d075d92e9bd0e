#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace splatprune {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

// Runs one `splatprune` invocation. `args` excludes the program name.
// Diagnostics go to `err` as lines starting with "error:".
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace splatprune
