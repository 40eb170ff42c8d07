#include <iostream>

#include "photostyle/cli.hpp"

int main(int argc, char** argv) { return photostyle::run_cli(argc, argv, std::cout, std::cerr); }
