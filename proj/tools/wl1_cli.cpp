#include <iostream>
#include <string>
#include <vector>

#include "wl1/cli_commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return wl1::cli::run(args, std::cout, std::cerr);
}
