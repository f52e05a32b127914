#include <iostream>
#include <string>
#include <vector>

#include "fiegarch/harness.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return fiegarch::cli(args, std::cout, std::cerr);
}
