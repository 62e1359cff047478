#include "trilinear/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return trilinear::cli::run(args, std::cout, std::cerr);
}
