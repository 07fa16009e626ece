#include <iostream>

#include "blockfw/cli.hpp"

int main(int argc, char** argv) { return blockfw::run_cli(argc, argv, std::cout, std::cerr); }
