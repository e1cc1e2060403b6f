#include "naloss/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return naloss::runCli(argc, argv, std::cout, std::cerr);
}
