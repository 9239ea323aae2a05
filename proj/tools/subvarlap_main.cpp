#include <iostream>
#include <string>
#include <vector>

#include "subvarlap/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return subvarlap::run(args, std::cout, std::cerr);
}
