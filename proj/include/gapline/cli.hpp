#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gapline::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes: 0 success, 1 bad input or cap violation, 2 a checked
// invariant failed (e.g. a Bonferroni inequality).
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInvariant = 2;

// Parses a non-negative integer written plainly or in scientific notation
// ("100000000", "1e8", "2.5e6"). Rejects values that are not integral or
// exceed 2^63 - 1.
uint64_t parse_count(std::string_view text);

// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// Runs one command line (args excludes the program name). Report text goes
// to `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gapline::cli
