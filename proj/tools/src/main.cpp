#include <iostream>

#include "forgan/cli/app.hpp"

int main(int argc, char** argv) {
    return forgan::cli::run_cli(argc, argv, std::cout, std::cerr);
}
