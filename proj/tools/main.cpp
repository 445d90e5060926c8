#include <iostream>
#include <string>
#include <vector>

#include "pocbounds/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return poc::run_cli(args, std::cout, std::cerr);
}
