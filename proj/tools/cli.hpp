#pragma once

#include <ostream>

namespace dmilp::cli {

// Exit codes of every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotFeasible = 2;
inline constexpr int kExitNodeLimit = 3;

// Entry point behind the dmilp executable; out/err replace stdout/stderr.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dmilp::cli
