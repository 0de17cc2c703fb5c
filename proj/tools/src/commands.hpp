#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hetsched::cli {

enum ExitCode : int { ok = 0, usage = 1, invalid_input = 2, internal = 3 };

// Parses and runs one command line. Never throws; failures map to ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hetsched::cli
