#include <iostream>

#include "bdg/cli.hpp"

int main(int argc, char** argv) { return bdg::cli::run(argc, argv, std::cout, std::cerr); }
