#include <iostream>

#include "gchs/cli.hpp"

int main(int argc, char** argv) { return gchs::cli::run(argc, argv, std::cout, std::cerr); }
