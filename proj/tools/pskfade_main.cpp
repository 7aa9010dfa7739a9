#include <iostream>
#include <string>
#include <vector>

#include "pskfade/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return pskfade::cli::run(args, std::cout, std::cerr);
}
