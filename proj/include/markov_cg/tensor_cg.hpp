#pragma once

// Edge-level coarse-graining on X (x) X.
//
// Edge tensors are n x n matrices. Primal tensors (Dx, fluxes) live in
// X (x) X, dual tensors (edge weights m = Q_pi K) in X* (x) X*; the pairing
// <<A, B>> = Tr(A* B) = sum_ij A_ij B_ij connects them.

#include <utility>
#include <vector>

#include "markov_cg/coarse_grain.hpp"

namespace markov_cg {

enum class TensorRole { Primal, Dual };

struct EdgeTensor {
  Matrix entries;
  TensorRole role = TensorRole::Primal;

  Eigen::Index n() const noexcept { return entries.rows(); }
};

/// <<A, B>> = sum_ij A_ij B_ij
double tensor_pairing(const EdgeTensor& a, const EdgeTensor& b);

/// m_ij = pi_i K_ij. Throws InvariantMismatch unless pi is invariant to tol.
EdgeTensor edge_weight(const MarkovMatrix& K, const ProbVector& pi,
                       double tol = 1e-10);

/// (M~ b_hat)_ij = b_hat_{phi(i) phi(j)}, i.e. M b_hat M*.
EdgeTensor lift(const ClusterMap& phi, const EdgeTensor& b_hat);

/// (M~* b)_kl = sum over the block pair (k, l) of b_ij, i.e. M* b M.
EdgeTensor restrict(const ClusterMap& phi, const EdgeTensor& b);

/// N~ = Q_m_hat^{-1} M~* Q_m and its adjoint N~* = Q_m M~ Q_m_hat^{-1}.
///
/// Block pairs with m_hat_kl = 0 map to 0 (every m_ij in that pair is zero,
/// so the weighted sum vanishes as well).
class EdgeReconstruction {
 public:
  EdgeReconstruction(ClusterMap phi, EdgeTensor m, EdgeTensor m_hat);

  /// (N~ b)_kl = sum_{block kl} m_ij b_ij / m_hat_kl
  EdgeTensor apply(const EdgeTensor& b) const;
  /// (N~* b_hat)_ij = m_ij b_hat_{phi(i)phi(j)} / m_hat_{phi(i)phi(j)}
  EdgeTensor adjoint(const EdgeTensor& b_hat) const;

  const ClusterMap& phi() const noexcept { return phi_; }
  const EdgeTensor& m() const noexcept { return m_; }
  const EdgeTensor& m_hat() const noexcept { return m_hat_; }

 private:
  ClusterMap phi_;
  EdgeTensor m_;
  EdgeTensor m_hat_;
};

/// Validates m >= 0 and m_hat == restrict(m) to 1e-12 (WeightMismatch).
EdgeReconstruction edge_reconstruct_op(const EdgeTensor& m,
                                       const EdgeTensor& m_hat,
                                       const ClusterMap& phi);

/// Incidence operator of the complete graph on n vertices, both
/// orientations: (Dx)_ij = x_i - x_j. It acts functionally; `dense()` builds
/// the n^2 x n matrix (row index i*n + j) for oracles and least squares.
class IncidenceOperator {
 public:
  explicit IncidenceOperator(Eigen::Index n) : n_(n) {}

  Eigen::Index n() const noexcept { return n_; }
  EdgeTensor apply(const Vector& x) const;
  /// (D* b)_l = sum_{j != l} (b_lj - b_jl); the diagonal of b is ignored.
  Vector adjoint(const EdgeTensor& b) const;
  Matrix dense() const;

 private:
  Eigen::Index n_;
};

/// (Dx)_ij = x_i - x_j
EdgeTensor incidence_apply(const Vector& x);
/// (D* b)_l = sum_j (b_lj - b_jl)
Vector incidence_adjoint(const EdgeTensor& b);

/// Result of assembling D_hat = N~ D M column by column.
/// Both residuals are taken over block pairs with positive coarse weight;
/// elsewhere N~ is zero by convention.
struct CoarseIncidence {
  IncidenceOperator op;
  /// n_hat^2 x n_hat matrix of N~ D M, column k = N~ D M e_hat_k.
  Matrix assembled;
  /// max-abs deviation from the canonical incidence on X_hat, over block
  /// pairs with m_hat > 0.
  double canonical_residual = 0;
  /// max over sample vectors of ||M~ D_hat x_hat - D M x_hat||_inf
  /// evaluated on the basis vectors.
  double commutation_residual = 0;
};

/// Builds D_hat = N~ D M. Throws WeightDegenerate if some block pair has
/// m_hat ~ 0 while the weighted numerator is not.
CoarseIncidence coarse_incidence(const ClusterMap& phi, const EdgeTensor& m);

struct QuotientGraph {
  int n_hat = 0;
  std::vector<std::pair<int, int>> edges;  // directed, k != l, sorted
  std::vector<int> membership;             // phi

  bool has_edge(int k, int l) const;
  /// Undirected view: {k, l} with k < l whenever either orientation exists.
  std::vector<std::pair<int, int>> symmetrized() const;
};

/// Edge (k, l), k != l, iff some i in block k, j in block l has K_ij > 0.
QuotientGraph quotient_graph(const MarkovMatrix& K, const ClusterMap& phi);

}  // namespace markov_cg
