#include <iostream>
#include <string>
#include <vector>

#include "sagnac/cli.hpp"

int main(int argc, char** argv) {
    return sagnac::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
