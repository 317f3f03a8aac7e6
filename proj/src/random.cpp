#include "markov_cg/random.hpp"

#include <algorithm>

namespace markov_cg {

int Sampler::integer(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng_);
}

double Sampler::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

Vector Sampler::vector(Eigen::Index n, double lo, double hi) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
  return v;
}

ProbVector Sampler::positive_measure(Eigen::Index n, double floor) {
  Vector v = vector(n, floor, 1.0);
  v /= v.sum();
  return ProbVector::positive(std::move(v));
}

ClusterMap Sampler::partition(int n, int n_hat) {
  std::vector<int> a(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    a[static_cast<size_t>(i)] = i < n_hat ? i : integer(0, n_hat - 1);
  }
  std::shuffle(a.begin(), a.end(), rng_);
  return ClusterMap::make(std::move(a), n_hat);
}

ClusterMap Sampler::partition(int n) { return partition(n, integer(1, n)); }

ReversibleChain Sampler::reversible_chain(int n, double zero_fraction) {
  Matrix W(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double w = uniform(0.05, 1.0);
      if (j > i + 1 && uniform(0.0, 1.0) < zero_fraction) w = 0.0;
      W(i, j) = W(j, i) = w;
    }
  }
  const Vector rows = W.rowwise().sum();
  Matrix K = rows.cwiseInverse().asDiagonal() * W;
  Vector pi = rows / rows.sum();
  return ReversibleChain{MarkovMatrix::validate(K), ProbVector::positive(pi)};
}

MarkovMatrix Sampler::positive_chain(int n) {
  Matrix K(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) K(i, j) = uniform(0.05, 1.0);
    K.row(i) /= K.row(i).sum();
  }
  return MarkovMatrix::validate(K);
}

Matrix Sampler::positive_tensor(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = uniform(0.05, 1.0);
  }
  return m;
}

}  // namespace markov_cg
