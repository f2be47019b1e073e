#include <iostream>
#include <string>
#include <vector>

#include "horseshoe/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return horseshoe::cli::run(args, std::cout, std::cerr);
}
