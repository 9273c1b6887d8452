#include <iostream>

#include "brightside/cli.hpp"

int main(int argc, char** argv) { return brightside::run_cli(argc, argv, std::cout, std::cerr); }
