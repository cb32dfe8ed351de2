#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace afse {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `afse` tool. args excludes the program name. Returns
// the process exit code (0 ok, 1 runtime failure, 2 usage/config error).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace afse
