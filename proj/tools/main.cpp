#include <iostream>

#include "cdprune/cli.hpp"

int main(int argc, char** argv) { return cdprune::cli(argc, argv, std::cout, std::cerr); }
