#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pkgprof::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDataError = 1;
inline constexpr int kUsageError = 2;

// Runs `pkgprof <subcommand> ...`; args excludes the program name. Data goes
// to files (or out for --help), diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pkgprof::cli
