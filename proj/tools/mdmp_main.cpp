#include <iostream>

#include "mdmp/cli.hpp"

int main(int argc, char** argv) { return mdmp::run_cli(argc, argv, std::cout, std::cerr); }
