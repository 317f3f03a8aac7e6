#pragma once

// Gradient-flow form of reversible dynamics on X*:
//
//   c' = -D* b,   b = 1/2 Q_m D rho,   rho = Q_pi^{-1} c,   m = Q_pi K
//
// so that A* = -1/2 D* Q_m D Q_pi^{-1}, and the matching coarse-level
// decomposition together with flux reconstruction from coarse data.

#include <vector>

#include "markov_cg/tensor_cg.hpp"

namespace markov_cg {

struct ContinuityState {
  double t = 0;
  Vector c;
  Vector rho;
  EdgeTensor b;
};

struct FluxReconstruction {
  EdgeTensor b1;  // N~* b_hat
  EdgeTensor b2;  // minimum-norm solution of D* b2 = x*
  Vector x_star;
  /// <1, x*>, which must vanish for D* b2 = x* to be solvable.
  double fredholm = 0;
  /// ||D* b2 - x*||_inf
  double residual = 0;
  /// ||D_hat* M~* b2||_inf
  double kernel_residual = 0;

  EdgeTensor total() const {
    return EdgeTensor{b1.entries + b2.entries, TensorRole::Dual};
  }
};

/// -1/2 D* Q_m D Q_pi^{-1} c. Throws NotReversible unless K is in detailed
/// balance with pi to `tol`.
Vector gradient_flow_rhs(const Vector& c, const MarkovMatrix& K,
                         const ProbVector& pi, double tol = 1e-10);

/// b = 1/2 Q_m D rho with rho = c / pi.
EdgeTensor flux_of(const Vector& c, const MarkovMatrix& K, const ProbVector& pi,
                   double tol = 1e-10);

struct CoarseStep {
  Vector c_hat_dot;
  EdgeTensor b_hat;
};

/// The same decomposition for the coarse chain (K_hat, pi_hat).
CoarseStep coarse_evolution_step(const Vector& c_hat, const MarkovMatrix& K_hat,
                                 const ProbVector& pi_hat, double tol = 1e-10);

/// Reconstructs a fine flux b = b1 + b2 from a coarse flux b_hat:
/// b1 = N~* b_hat and D* b2 = x* := (N* D_hat* - D* N~*) b_hat, with b2 the
/// minimum-norm least-squares solution. `m` is the fine edge weight of the
/// chain whose invariant measure is pair.pi.
FluxReconstruction reconstruct_flux(const EdgeTensor& b_hat,
                                    const CoarseGrainPair& pair,
                                    const EdgeTensor& m);

enum class Integrator { ExplicitEuler, Exponential };

/// Integrates c' = A* c from c0 and records (t, c, rho, b) at every step.
/// Euler steps require dt <= 1 / max_i |A_ii| (StepTooLarge otherwise).
std::vector<ContinuityState> evolve(const ProbVector& c0, const MarkovMatrix& K,
                                    const ProbVector& pi, double t_end,
                                    double dt,
                                    Integrator scheme = Integrator::ExplicitEuler);

}  // namespace markov_cg
