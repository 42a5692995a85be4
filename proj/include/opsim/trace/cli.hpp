#pragma once

#include <iosfwd>

namespace opsim::trace {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;    // usage, I/O, model diagnostics, malformed traces
inline constexpr int kExitRuntime = 2;  // failures while simulating

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace opsim::trace
