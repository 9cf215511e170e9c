#pragma once

#include <iosfwd>

namespace chemserve::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand. Results go to `out`, diagnostics to `err`.
// Returns 0 on success, 1 on a domain error, 2 on a usage error.
int run(int argc, const char *const *argv, std::istream &in, std::ostream &out,
        std::ostream &err);

}  // namespace chemserve::cli
