#include <iostream>

#include "rh/commands.hpp"

int main(int argc, char** argv) { return rh::run_cli(argc, argv, std::cout, std::cerr); }
