#include <iostream>

#include "photoscout/cli.hpp"

int main(int argc, char** argv) { return photoscout::cli::run(argc, argv, std::cout, std::cerr); }
