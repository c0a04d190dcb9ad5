#pragma once

namespace minsurf {

/// Full command-line entry point. Returns the process exit code:
/// 0 finished (converged or vanished), 2 step limit reached,
/// 64 usage errors, 1 runtime failures.
int run_cli(int argc, const char* const* argv);

}  // namespace minsurf
