#include <iostream>

#include "oscmc/cli.hpp"

int main(int argc, char** argv) { return oscmc::cli_main(argc, argv, std::cout, std::cerr); }
