#include <iostream>

#include "mconc/cli.hpp"

int main(int argc, char** argv) { return mconc::cli::run(argc, argv, std::cout, std::cerr); }
