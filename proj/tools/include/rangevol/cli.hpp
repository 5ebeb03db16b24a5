#pragma once

#include <iosfwd>

namespace rangevol {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation. Normal output goes to `out`; failures print a single
/// line `error: code=<Code> message="..."` to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rangevol
