#include <iostream>

#include "schmidtlab/cli.hpp"

int main(int argc, char** argv) { return schmidtlab::run_cli(argc, argv, std::cout, std::cerr); }
