#include <iostream>

#include "thermochain/cli.hpp"

int main(int argc, char** argv) {
  return thermochain::cli::run(argc, argv, std::cout, std::cerr);
}
