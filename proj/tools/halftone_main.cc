#include <iostream>
#include <string>
#include <vector>

#include "halftone/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return halftone::cli::Run(args, std::cout, std::cerr);
}
