#include <iostream>

#include "bequest/cli.hpp"

int main(int argc, char** argv) { return bequest::cli::run(argc, argv, std::cout, std::cerr); }
