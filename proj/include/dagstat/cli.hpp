#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace dagstat::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name. Diagnostics go to
/// `err`; results go to `out` unless --out names a file.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace dagstat::cli
