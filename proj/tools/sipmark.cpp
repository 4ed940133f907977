#include <iostream>

#include "sipmark_cli.hpp"

int main(int argc, char** argv) { return sipmark::cli::run(argc, argv, std::cout, std::cerr); }
