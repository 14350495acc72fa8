#include <iostream>

#include "ballcover/cli.hpp"

int main(int argc, char** argv) { return ballcover::run_cli(argc, argv, std::cout, std::cerr); }
