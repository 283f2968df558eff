#include <iostream>
#include <string>
#include <vector>

#include "iebench/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return iebench::run_cli(args, std::cout, std::cerr);
}
