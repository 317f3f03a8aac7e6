#pragma once

// Coarse-graining of a Markov chain along a partition of its state space.
//
//   M : X_hat -> X        (M x_hat)_i = x_hat_{phi(i)}
//   N = Q_pi_hat^{-1} M* Q_pi   (the L^2(pi)-adjoint of M, a weighted
//                                Moore-Penrose inverse)
//   P = M N               Markov projection onto block-constant functions
//   K_hat = N K M,  A_hat = N A M
//
// Products with M and M* are gather/scatter over the assignment vector; the
// dense matrices are kept alongside for reports and as test oracles.

#include <span>
#include <vector>

#include "markov_cg/markov_core.hpp"

namespace markov_cg {

/// Surjective map phi : {0..n-1} -> {0..n_hat-1}.
class ClusterMap {
 public:
  /// n_hat < 0 means "max(assignment) + 1".
  static ClusterMap make(std::vector<int> assignment, int n_hat = -1);
  static ClusterMap identity(int n);

  int n() const noexcept { return static_cast<int>(assignment_.size()); }
  int n_hat() const noexcept { return n_hat_; }
  int operator[](int i) const { return assignment_[static_cast<size_t>(i)]; }
  const std::vector<int>& assignment() const noexcept { return assignment_; }
  std::span<const int> block(int k) const {
    return blocks_[static_cast<size_t>(k)];
  }

 private:
  ClusterMap(std::vector<int> assignment, int n_hat);

  std::vector<int> assignment_;
  int n_hat_;
  std::vector<std::vector<int>> blocks_;
};

/// Bundle tying a chain's measure to its reduction.
struct CoarseGrainPair {
  ClusterMap phi;
  MarkovMatrix M;  // n x n_hat, deterministic
  MarkovMatrix N;  // n_hat x n
  ProbVector pi;
  ProbVector pi_hat;
  MarkovMatrix P;  // n x n

  int n() const noexcept { return phi.n(); }
  int n_hat() const noexcept { return phi.n_hat(); }
};

MarkovMatrix build_M(const ClusterMap& phi);

/// M x_hat
Vector lift_function(const ClusterMap& phi, const Vector& x_hat);
/// M* p  (block sums)
Vector aggregate(const ClusterMap& phi, const Vector& p);

ProbVector coarse_measure(const ClusterMap& phi, const ProbVector& pi);

/// N_{k,i} = pi_i / pi_hat_k for phi(i) = k. Requires pi positive.
MarkovMatrix build_N(const ClusterMap& phi, const ProbVector& pi);

/// N x  (pi-weighted block averages)
Vector reconstruct(const CoarseGrainPair& pair, const Vector& x);
/// N* p_hat  (spreads block mass proportionally to pi)
Vector reconstruct_adjoint(const CoarseGrainPair& pair, const Vector& p_hat);

MarkovMatrix projection_P(const MarkovMatrix& M, const MarkovMatrix& N);

CoarseGrainPair make_coarse_grain_pair(const ClusterMap& phi,
                                       const ProbVector& pi);

/// (x, y)_pi = sum_i x_i y_i pi_i
double weighted_inner(const Vector& x, const Vector& y, const ProbVector& pi);

/// K_hat = N K M. Throws InvariantMismatch if pair.pi is not invariant for K
/// to `tol`.
MarkovMatrix coarse_markov(const MarkovMatrix& K, const CoarseGrainPair& pair,
                           double tol = 1e-10);

/// A_hat = N A M. Throws InvariantMismatch if A* pair.pi != 0 to `tol`
/// (scaled by the largest rate).
Generator coarse_generator(const Generator& A, const CoarseGrainPair& pair,
                           double tol = 1e-10);

/// ||K M - M K_hat||_inf (max absolute row sum). Zero iff the chain is
/// exactly lumpable under phi. Diagnostic only.
double lumpability_defect(const MarkovMatrix& K, const CoarseGrainPair& pair);

/// p -> P* K* P* p, the chain projected onto Range(N*).
Vector projected_step(const MarkovMatrix& K, const CoarseGrainPair& pair,
                      const Vector& p);

/// Max-abs residuals of the algebraic identities every pair satisfies.
struct IdentityResiduals {
  double NM_minus_I = 0;
  double MNM_minus_M = 0;
  double NMN_minus_N = 0;
  double Qpihat_minus_MtQpiM = 0;
  double Ntpihat_minus_pi = 0;
  double pihat_minus_Mtpi = 0;
  double P2_minus_P = 0;
  double P_detailed_balance = 0;

  double max() const;
};

/// Evaluated with dense products, independent of the gather/scatter path.
IdentityResiduals identity_residuals(const CoarseGrainPair& pair);

/// Classical pseudoinverse (M* M)^{-1} M*.
Matrix moore_penrose_of_M(const MarkovMatrix& M);

}  // namespace markov_cg
