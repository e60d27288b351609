#include <iostream>
#include <string>
#include <vector>

#include "typlab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return typlab::cli::run(args, std::cout, std::cerr);
}
