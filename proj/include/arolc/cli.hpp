#pragma once

#include <iosfwd>

namespace arolc {

/// Entry point of the `arolc` command-line tool. Returns the process exit code:
/// 0 success, 1 usage or parse error, 2 simulation divergence.
int cli_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace arolc
