// cli.hpp — command-line front end: simulate | ensemble | scaling | export.
#pragma once

namespace qpl {

// Parses arguments, runs the selected command, writes outputs. Returns the
// process exit code; failures print a machine-readable error JSON to stderr
// (2 for validation/usage problems, 1 for runtime failures).
int run_cli(int argc, const char* const* argv);

}  // namespace qpl
