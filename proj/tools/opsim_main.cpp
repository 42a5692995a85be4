#include <iostream>

#include "opsim/trace/cli.hpp"

int main(int argc, char** argv) { return opsim::trace::cli_main(argc, argv, std::cout, std::cerr); }
