#include <iostream>

#include "amamm/cli.hpp"

int main(int argc, char** argv) { return amamm::run_cli(argc, argv, std::cout, std::cerr); }
