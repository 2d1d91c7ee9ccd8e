#include <iostream>

#include "rbm_cli.hpp"

int main(int argc, char** argv) {
  return rbm::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
