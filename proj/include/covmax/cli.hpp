#pragma once

#include <iosfwd>

namespace covmax::cli {

/// Exit codes: 0 success, 1 error, 2 rejection under --fail-on-reject.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitReject = 2;

/// Entry point of the `covmax` binary, with injectable output streams.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace covmax::cli
