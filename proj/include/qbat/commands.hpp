#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qbat {

/// Exit codes: 0 success, 1 some point or check failed, 2 usage error,
/// 3 runtime error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPointFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// args excludes the program name: {"evolve", "--n-tls", "4", ...}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version_string();

}  // namespace qbat
