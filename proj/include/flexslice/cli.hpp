#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace flexslice {

enum ExitCode
{
    kExitOk            = 0,
    kExitDrcBlocked    = 1,
    kExitIoError       = 2,
    kExitInvalidConfig = 3,
};

// Entry point of the command-line tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace flexslice
