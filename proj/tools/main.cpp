#include <iostream>
#include <string>
#include <vector>

#include "ksym/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ksym::run_cli(args, std::cout, std::cerr);
}
