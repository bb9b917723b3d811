#include <iostream>
#include <string>
#include <vector>

#include "vertalign/cli.hpp"

int main(int argc, char** argv) {
  vertalign::configure_logging();
  std::vector<std::string> args(argv + 1, argv + argc);
  return vertalign::run_cli(args, std::cout, std::cerr);
}
