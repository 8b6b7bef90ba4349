#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace minilab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;   // bad flags, unreadable or invalid input files
inline constexpr int kExitRuntime = 3;  // failures after everything loaded

// args excludes the program name. Subcommands: simulate, metrics, report,
// serve. Results go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace minilab::cli
