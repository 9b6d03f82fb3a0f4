#include <iostream>

#include "hessex/cli/commands.hpp"

int main(int argc, char** argv) { return hessex::cli::run(argc, argv, std::cout, std::cerr); }
