#pragma once

#include <iosfwd>

namespace qubot {

// Exit codes of the `qubot` tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2, kExitCheck = 3 };

// Entry point of the `qubot` tool; `out`/`err` receive what would go to
// stdout/stderr. Output files are written only after every computation
// succeeded.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qubot
