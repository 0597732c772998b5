#include <iostream>
#include <string>
#include <vector>

#include "normlex/cli.h"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return normlex::run_cli(args, std::cin, std::cout, std::cerr);
}
