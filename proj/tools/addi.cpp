#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "addiplication/cli.hpp"

int main(int argc, char** argv) {
  try {
    return addi::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
