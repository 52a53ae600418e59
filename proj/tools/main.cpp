#include <iostream>

#include "ldp/cli.hpp"

int main(int argc, char** argv) {
  return ldp::cli::run_cli(argc, argv, std::cout, std::cerr);
}
