#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return fairpca::cli::run(argc, argv, std::cout, std::cerr);
}
