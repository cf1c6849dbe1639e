#include <iostream>
#include <string>
#include <vector>

#include "cvdistill/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cvdistill::run_cli(args, std::cout, std::cerr);
}
