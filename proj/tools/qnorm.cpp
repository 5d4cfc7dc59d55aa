#include <iostream>

#include "qnormal/cli.hpp"

int main(int argc, char** argv) { return qnormal::cli::run(argc, argv, std::cout, std::cerr); }
