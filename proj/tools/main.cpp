#include <iostream>
#include <string>
#include <vector>

#include "sandwich/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return sandwich::cli::run(args, std::cout, std::cerr);
}
