#include <cstdlib>
#include <iostream>
#include <string>

#include "markov_cg/acceptance.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 42;
  if (argc > 1) seed = std::stoull(argv[1]);
  const auto results = markov_cg::run_acceptance(seed);
  return markov_cg::print_acceptance(results, std::cout) ? EXIT_SUCCESS
                                                         : EXIT_FAILURE;
}
