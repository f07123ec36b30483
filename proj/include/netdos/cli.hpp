#pragma once

#include <string>
#include <vector>

namespace netdos {

/// Runs the command-line tool; args[0] is the program name. Returns 0 on
/// success, 2 on usage errors and 1 on runtime errors (message on stderr).
int cli_run(const std::vector<std::string>& args);
int cli_run(int argc, char** argv);

} // namespace netdos
