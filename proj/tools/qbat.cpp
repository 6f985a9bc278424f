#include <iostream>
#include <string>
#include <vector>

#include "qbat/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qbat::run_cli(args, std::cout, std::cerr);
}
