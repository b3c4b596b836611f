#include <iostream>

#include "loadcouple/cli.hpp"

int main(int argc, char** argv) { return loadcouple::cli::run(argc, argv, std::cout, std::cerr); }
