#include <iostream>

#include "comb_ranger/cli.hpp"

int main(int argc, char** argv) {
  return comb_ranger::run_cli(argc, argv, std::cout, std::cerr);
}
