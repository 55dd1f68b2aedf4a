#pragma once

#include <iosfwd>

namespace mcap::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Parses argv and runs one subcommand. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcap::cli
