#include <iostream>

#include "sparsemoo/cli.hpp"

int main(int argc, char** argv) { return sparsemoo::cli::run(argc, argv, std::cout, std::cerr); }
