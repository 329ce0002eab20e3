#pragma once

namespace milb {

// Entry point behind the milboundary binary; exposed for in-process testing.
// Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 config error.
int run_cli(int argc, const char* const* argv);

}  // namespace milb
