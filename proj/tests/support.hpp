#pragma once

// Independent reference computations used as test oracles.

#include <cmath>

#include <doctest.h>

#include "markov_cg/coarse_grain.hpp"
#include "markov_cg/functionals.hpp"
#include "markov_cg/random.hpp"
#include "markov_cg/tensor_cg.hpp"

namespace markov_cg::testing {

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Invariant measure by repeated application of K* to the uniform measure.
inline Vector power_iteration(const Matrix& K, int steps = 100000) {
  Vector p = Vector::Constant(K.rows(), 1.0 / static_cast<double>(K.rows()));
  // Lazy chain avoids periodicity.
  const Matrix L = 0.5 * (Matrix::Identity(K.rows(), K.cols()) + K);
  for (int s = 0; s < steps; ++s) {
    const Vector next = L.transpose() * p;
    if ((next - p).cwiseAbs().maxCoeff() < 1e-16) return next;
    p = next;
  }
  return p;
}

inline Matrix dense_Q(const Vector& pi) { return pi.asDiagonal(); }

// Exactly lumpable chain: row sums into each block depend only on the
// source block. Built as M K_hat N_u with N_u the uniform reconstruction.
inline MarkovMatrix lumpable_chain(Sampler& s, const ClusterMap& phi) {
  const MarkovMatrix K_hat = s.positive_chain(phi.n_hat());
  Matrix K = Matrix::Zero(phi.n(), phi.n());
  for (int i = 0; i < phi.n(); ++i) {
    for (int l = 0; l < phi.n_hat(); ++l) {
      const auto block = phi.block(l);
      Vector w = s.vector(static_cast<Eigen::Index>(block.size()), 0.1, 1.0);
      w /= w.sum();
      for (size_t r = 0; r < block.size(); ++r) {
        K(i, block[r]) = K_hat(phi[i], l) * w(static_cast<Eigen::Index>(r));
      }
    }
  }
  return validate_markov(K);
}

// D x by definition, as a dense n x n matrix.
inline Matrix incidence_by_definition(const Vector& x) {
  const Eigen::Index n = x.size();
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = x(i) - x(j);
  }
  return out;
}

// Rayleigh quotient D_K(x) / Var_pi(x) minimized over a grid of directions.
inline double two_state_rayleigh_grid(const MarkovMatrix& K,
                                      const ProbVector& pi, int samples) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const double theta = M_PI * k / samples;
    Vector x(2);
    x << std::cos(theta), std::sin(theta);
    const double mean = expectation(x, pi);
    const double var = expectation((x.array() - mean).square().matrix(), pi);
    if (var < 1e-12) continue;
    best = std::min(best, dirichlet(x, K, pi) / var);
  }
  return best;
}

}  // namespace markov_cg::testing
