#include <iostream>

#include "dipole/cli.hpp"

int main(int argc, char** argv) { return dipole::run_cli(argc, argv, std::cout, std::cerr); }
