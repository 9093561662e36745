#include <iostream>

#include "rmflab/cli.hpp"

int main(int argc, char** argv) { return rmflab::run_cli(argc, argv, std::cout, std::cerr); }
