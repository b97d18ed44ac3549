#include <exception>
#include <iostream>

#include "optrate/cli.hpp"

int main(int argc, char** argv) {
  try {
    return optrate::parse_and_dispatch(argc, argv, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
