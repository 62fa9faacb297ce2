#include <iostream>

#include "covmax/cli.hpp"

int main(int argc, char** argv) { return covmax::cli::run_cli(argc, argv, std::cout, std::cerr); }
