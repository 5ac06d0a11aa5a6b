#include "spread/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return spread::run_cli(argc, argv, std::cout, std::cerr); }
