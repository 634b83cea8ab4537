#include "graphck/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    graphck::CliResult res = graphck::run_cli(args);
    std::cout << res.output;
    return res.exit_code;
}
