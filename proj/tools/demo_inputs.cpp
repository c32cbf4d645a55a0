#include <cstdlib>
#include <exception>
#include <iostream>

#include "liftkit/cli/synthetic.hpp"

int main(int argc, char** argv) {
  if (argc < 2 || argc > 3) {
    std::cerr << "usage: liftkit_demo_inputs <dir> [seed]\n";
    return 2;
  }
  try {
    const std::uint64_t seed = argc == 3 ? std::strtoull(argv[2], nullptr, 10) : 1;
    liftkit::cli::write_demo_inputs(argv[1], seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
