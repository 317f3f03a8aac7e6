#pragma once

// Seeded generators for randomized verification (tests, acceptance suite and
// the CLI self-test).

#include <cstdint>
#include <random>

#include "markov_cg/coarse_grain.hpp"

namespace markov_cg {

struct ReversibleChain {
  MarkovMatrix K;
  ProbVector pi;
};

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi);  // inclusive
  double uniform(double lo, double hi);
  Vector vector(Eigen::Index n, double lo, double hi);

  /// Entries bounded below by `floor` before normalization.
  ProbVector positive_measure(Eigen::Index n, double floor = 0.05);
  /// Surjective map of n states onto n_hat clusters, in random order.
  ClusterMap partition(int n, int n_hat);
  /// n_hat drawn uniformly from [1, n].
  ClusterMap partition(int n);

  /// K = W / rowsum(W) for a random symmetric W > 0, so pi ~ rowsum(W) is
  /// exactly reversible. `zero_fraction` of the off-diagonal pairs are
  /// dropped (the chain stays irreducible through the diagonal-adjacent
  /// path i <-> i+1).
  ReversibleChain reversible_chain(int n, double zero_fraction = 0.0);
  /// Random row-stochastic matrix with positive entries (generally not
  /// reversible).
  MarkovMatrix positive_chain(int n);
  /// Entrywise positive n x n tensor.
  Matrix positive_tensor(int n);

  std::mt19937_64& engine() noexcept { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace markov_cg
