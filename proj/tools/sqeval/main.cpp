#include <iostream>

#include "sqeval/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sqeval::cli::run(args, std::cout, std::cerr);
}
