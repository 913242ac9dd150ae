#include <iostream>
#include <string>
#include <vector>

#include "dchoice/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dchoice::run_cli(args, std::cout, std::cerr);
}
