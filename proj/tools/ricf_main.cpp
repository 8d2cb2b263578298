#include <iostream>

#include "ricf/cli.hpp"

int main(int argc, char** argv) {
  return ricf::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
