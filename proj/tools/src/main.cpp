#include <iostream>

#include "smallnoise/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return smallnoise::run_cli(args, std::cout, std::cerr);
}
