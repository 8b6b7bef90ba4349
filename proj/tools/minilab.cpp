#include <iostream>
#include <string>
#include <vector>

#include "minilab/cli/cli.hpp"

int main(int argc, char** argv) {
  return minilab::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
