#pragma once

namespace isingps {

// Entry point behind the `isingps` binary. Exit codes: 0 success, 1 internal
// failure or failed verification, 2 parse error, 3 capacity error,
// 4 trajectory divergence.
int run_cli(int argc, const char* const* argv);

}  // namespace isingps
