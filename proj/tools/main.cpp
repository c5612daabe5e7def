#include <iostream>

#include "swipt/cli.hpp"

int main(int argc, char** argv) { return swipt::cli::run(argc, argv, std::cout, std::cerr); }
