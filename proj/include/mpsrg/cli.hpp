#pragma once

#include <string>
#include <vector>

namespace mpsrg {

/// Run one CLI invocation. `args` holds the arguments after the program
/// name, e.g. {"flow", "--preset", "aklt", "--steps", "8"}.
///
/// Exit codes: 0 success, 1 numerical failure, 2 invalid input or flags,
/// 3 non-convergent (periodic) flow.
int run_command(const std::vector<std::string>& args);

} // namespace mpsrg
