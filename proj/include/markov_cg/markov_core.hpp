#pragma once

// Finite-state Markov matrices, generators and invariant measures.
//
// Convention used throughout the library: K(i, j) is the transition weight
// i -> j, so K acts on functions (column vectors) from the left and the
// adjoint K* = K^T acts on measures.

#include <Eigen/Dense>

#include "markov_cg/errors.hpp"

namespace markov_cg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Tolerances {
  double structural = 1e-12;  // row sums, mass, sign checks
  double spectral = 1e-9;     // null-space and eigenvalue decisions
  double solver = 1e-8;       // least-squares residuals
  double positivity = 1e-14;  // floor for "positive" measures
};

/// Probability vector: nonnegative entries summing to one.
class ProbVector {
 public:
  /// Validates nonnegativity and unit mass to `tol`.
  static ProbVector from(Vector entries, double tol = 1e-12,
                         double eps_pos = 1e-14);
  /// Like `from`, but additionally requires every entry >= eps_pos.
  static ProbVector positive(Vector entries, double tol = 1e-12,
                             double eps_pos = 1e-14);
  static ProbVector uniform(Eigen::Index n);

  const Vector& entries() const noexcept { return entries_; }
  Eigen::Index size() const noexcept { return entries_.size(); }
  double operator()(Eigen::Index i) const { return entries_(i); }
  bool is_positive() const noexcept { return positive_; }

  /// Throws NonPositiveInvariant unless every entry >= eps_pos.
  const ProbVector& require_positive() const;

 private:
  ProbVector(Vector entries, bool positive)
      : entries_(std::move(entries)), positive_(positive) {}

  Vector entries_;
  bool positive_;
};

/// Row-stochastic matrix. Rectangular shapes are allowed so that the
/// deterministic coarse-graining matrix M (n x n_hat) and the reconstruction
/// N (n_hat x n) share the type.
class MarkovMatrix {
 public:
  static MarkovMatrix validate(const Matrix& entries, double tol = 1e-12);

  const Matrix& entries() const noexcept { return entries_; }
  Eigen::Index rows() const noexcept { return entries_.rows(); }
  Eigen::Index cols() const noexcept { return entries_.cols(); }
  bool is_square() const noexcept { return rows() == cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const {
    return entries_(i, j);
  }

 private:
  explicit MarkovMatrix(Matrix entries) : entries_(std::move(entries)) {}
  Matrix entries_;
};

/// Markov generator: nonnegative off-diagonal, zero row sums.
class Generator {
 public:
  static Generator validate(const Matrix& entries, double tol = 1e-12);

  const Matrix& entries() const noexcept { return entries_; }
  Eigen::Index size() const noexcept { return entries_.rows(); }

 private:
  explicit Generator(Matrix entries) : entries_(std::move(entries)) {}
  Matrix entries_;
};

/// Relative density rho = p / pi.
struct DensityVector {
  Vector entries;
};

/// Validates a square transition matrix. Rows within `tol` of unit sum are
/// renormalized; anything further off is rejected.
MarkovMatrix validate_markov(const Matrix& K, double tol = 1e-12);

/// Unique positive invariant measure, taken from the right singular vector of
/// (K* - I) for the smallest singular value. Uniqueness is certified by the
/// gap to the second smallest singular value.
ProbVector invariant_measure(const MarkovMatrix& K, double tol = 1e-9,
                             double eps_pos = 1e-14);

/// Same as above for a generator: the measure spanning Ker(A*).
ProbVector invariant_measure(const Generator& A, double tol = 1e-9,
                             double eps_pos = 1e-14);

/// max_ij |pi_i K_ij - pi_j K_ji| <= tol
bool is_detailed_balance(const MarkovMatrix& K, const ProbVector& pi,
                         double tol = 1e-12);
bool is_detailed_balance(const Generator& A, const ProbVector& pi,
                         double tol = 1e-12);

/// max_ij |pi_i K_ij - pi_j K_ji|
double detailed_balance_residual(const Matrix& K, const Vector& pi);

/// ||K* pi - pi||_inf
double invariance_residual(const MarkovMatrix& K, const ProbVector& pi);

Generator generator_of(const MarkovMatrix& K);

/// p_{k+1} = K* p_k
ProbVector chain_step(const MarkovMatrix& K, const ProbVector& p);

DensityVector relative_density(const ProbVector& p, const ProbVector& pi);

}  // namespace markov_cg
