#include "pqtopk/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return pqtopk::cli::run({argv, argv + argc}, std::cout, std::cerr);
}
