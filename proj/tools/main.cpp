#include <iostream>

#include "arolc/cli.hpp"

int main(int argc, char** argv) { return arolc::cli_run(argc, argv, std::cout, std::cerr); }
