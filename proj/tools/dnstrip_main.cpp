#include "dnstrip/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return dnstrip::cli::run(argc, argv, std::cout, std::cerr);
}
