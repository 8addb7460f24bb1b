#include <iostream>

#include "nhhj/cli/commands.hpp"

int main(int argc, char** argv) { return nhhj::cli::run_cli(argc, argv, std::cout, std::cerr); }
