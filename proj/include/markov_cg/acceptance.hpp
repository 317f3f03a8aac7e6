#pragma once

// Randomized end-to-end verification of the library's identities and
// estimates. Shared by the acceptance test binary and `markov-cg selftest`.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace markov_cg {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

std::vector<CriterionResult> run_acceptance(std::uint64_t seed = 42);

/// One line per criterion; returns true iff every criterion passed.
bool print_acceptance(const std::vector<CriterionResult>& results,
                      std::ostream& out);

}  // namespace markov_cg
