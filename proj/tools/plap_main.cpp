#include <iostream>

#include "plap/cli.hpp"

int main(int argc, char** argv) { return plap::run_cli(argc, argv, std::cout, std::cerr); }
