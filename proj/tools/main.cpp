#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return awarekit::cli::run(argc, argv, std::cout, std::cerr); }
