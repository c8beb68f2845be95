#include <iostream>

#include "crankback/cli.hpp"

int main(int argc, char** argv) {
  return crankback::cli::run(argc, argv, std::cout, std::cerr);
}
