#include <iostream>

#include "branchlab/cli.hpp"

int main(int argc, char** argv) {
  return branchlab::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
