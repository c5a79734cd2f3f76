#include <iostream>

#include "mdx/cli.hpp"

int main(int argc, char** argv) { return mdx::run_cli(argc, argv, std::cout, std::cerr); }
