#pragma once

#include <string>
#include <vector>

namespace evograph {

// Runs one CLI invocation; args exclude the program name. Subcommands:
// validate, lineage, evaluate, generate, bench, synth. Returns the process
// exit status: 0 success, 1 domain failure, 2 usage error. Domain errors are
// reported as a single "error: ..." line on stderr.
int run_command(const std::vector<std::string>& args);

}  // namespace evograph
