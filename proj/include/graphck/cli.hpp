#pragma once

#include <string>
#include <vector>

namespace graphck {

struct CliResult {
    int exit_code = 0;   // 0 success, 1 domain failure, 2 usage
    std::string output;  // everything the tool prints
};

// the whole command-line tool behind a pure interface so tests can drive it;
// args exclude the program name
CliResult run_cli(const std::vector<std::string>& args);

} // namespace graphck
