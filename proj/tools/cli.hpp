#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace frit_cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitAssumption = 3;
inline constexpr int kExitData = 4;
inline constexpr int kExitNumerical = 5;

/// Runs one command; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "1..5", "1,2,7" or a single value.
std::vector<unsigned long long> parse_seed_list(const std::string& text);

}  // namespace frit_cli
