#include <iostream>
#include <string>
#include <vector>

#include "dagstat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dagstat::cli::run(args, std::cout, std::cerr);
}
