#include <iostream>
#include <string>
#include <vector>

#include "pmwls/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return pmwls::cli::run(args, std::cout, std::cerr);
}
