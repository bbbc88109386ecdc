#include <iostream>
#include <string>
#include <vector>

#include "keycast/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return keycast::run_cli(args, std::cin, std::cout, std::cerr);
}
