#include <iostream>
#include <string>
#include <vector>

#include "cli/run_config.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return axisolve::cli::run_cli(args, std::cout, std::cerr);
}
