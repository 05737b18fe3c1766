#include <iostream>
#include <string>
#include <vector>

#include "dwmf/cli/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return dwmf::cli::run(args, std::cout, std::cerr);
}
