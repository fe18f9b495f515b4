#include <iostream>
#include <string>
#include <vector>

#include "synapcount/cli.hpp"

int main(int argc, char** argv) {
  return synapcount::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
