#include <iostream>

#include "sie_cli/commands.hpp"

int main(int argc, char** argv) { return sie::cli::run_cli(argc, argv, std::cout, std::cerr); }
