#include "gns/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return gns::run_cli(argc, argv, std::cout, std::cerr); }
