#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace keycast {

// Exit codes of the keycast command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;       // a check or validation failed
inline constexpr int kExitUsage = 2;      // bad arguments or a domain error
inline constexpr int kExitResource = 3;   // SPACE_LIMIT or BUDGET_EXCEEDED
inline constexpr int kExitInternal = 4;   // an internal consistency check fired

// Runs one keycast command; `args` excludes the program name. "-" as an
// input path reads `in`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace keycast
