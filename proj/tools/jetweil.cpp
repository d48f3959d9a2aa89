#include <iostream>

#include "jetweil/cli.hpp"

int main(int argc, char** argv) { return jetweil::cli::run(argc, argv, std::cout, std::cerr); }
