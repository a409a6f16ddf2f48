#include <exception>
#include <iostream>

#include "gms/cli.hpp"

int main(int argc, char** argv) {
  try {
    return gms::run_cli(argc, argv, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "gms_lab: " << e.what() << '\n';
    return 1;
  }
}
