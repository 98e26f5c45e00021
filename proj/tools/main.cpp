#include "wgqed/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return wgqed::run_cli(argc, argv, std::cout, std::cerr); }
