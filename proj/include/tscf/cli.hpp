#pragma once

#include <string>
#include <vector>

namespace tscf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;      // bad arguments
inline constexpr int kExitData = 2;       // unreadable/malformed/mismatched inputs
inline constexpr int kExitAllFailed = 3;  // every requested instance failed

// Entry point shared by the binary and the tests. `args` excludes the
// program name. Never throws; failures are reported on stderr and through
// the exit code.
int run(const std::vector<std::string>& args);

}  // namespace tscf::cli
