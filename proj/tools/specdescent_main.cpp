#include <iostream>
#include <string>
#include <vector>

#include "specdescent/cli.hpp"

int main(int argc, char** argv) {
  return specdescent::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
