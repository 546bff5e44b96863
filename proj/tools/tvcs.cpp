#include <iostream>

#include "tvcs/cli.hpp"

int main(int argc, char** argv) { return tvcs::run_cli(argc, argv, std::cout, std::cerr); }
