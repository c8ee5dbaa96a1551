#include <iostream>

#include "cne/cli.hpp"

int main(int argc, char** argv) { return cne::cli::run(argc, argv, std::cout, std::cerr); }
