#include <iostream>
#include <string>
#include <vector>

#include "afse/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return afse::run_cli(args, std::cout, std::cerr);
}
