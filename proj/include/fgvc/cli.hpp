#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace fgvc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitConfigError = 2;

/// Runs one `fgvc` invocation; args excludes the program name.
/// Returns 0 on success, 1 for input errors, 2 for config or usage errors.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace fgvc::cli
