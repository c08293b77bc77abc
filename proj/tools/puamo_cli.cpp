#include <iostream>

#include "puamo/cli.hpp"

int main(int argc, char** argv) { return puamo::run_cli(argc, argv, std::cout, std::cerr); }
