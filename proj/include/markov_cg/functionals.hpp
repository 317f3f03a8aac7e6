#pragma once

// Energy and entropy functionals, Dirichlet forms, and variational estimates
// of Poincare-type and log-Sobolev constants for a chain and its coarse
// graining.

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "markov_cg/coarse_grain.hpp"

namespace markov_cg {

/// Scalar convex function with a (closed) lower domain bound.
class ConvexProfile {
 public:
  ConvexProfile(std::string name, std::function<double(double)> fn,
                double domain_min = -std::numeric_limits<double>::infinity());

  /// 1/2 r^2
  static ConvexProfile quadratic();
  /// r log r - r + 1 on r >= 0, with 0 log 0 = 0
  static ConvexProfile boltzmann();
  /// r^2
  static ConvexProfile square();
  /// r^4
  static ConvexProfile quartic();
  /// (r^2 + delta^2)^(p/2) - delta^p, a smoothed |r|^p
  static ConvexProfile smoothed_power(double p, double delta = 1e-3);
  /// Throws InvalidInput for unknown names.
  static ConvexProfile by_name(const std::string& name);

  const std::string& name() const noexcept { return name_; }
  double domain_min() const noexcept { return domain_min_; }
  bool in_domain(double r) const noexcept { return r >= domain_min_; }
  /// Throws DomainViolation outside the domain.
  double operator()(double r) const;

  /// Sampled check of strict midpoint convexity and nonnegativity over a
  /// grid of pairs drawn from [max(domain_min, lo), hi].
  bool certify(double lo = -4.0, double hi = 4.0, int samples = 1000) const;

 private:
  std::string name_;
  std::function<double(double)> fn_;
  double domain_min_;
};

/// E_pi(x) = sum_i pi_i x_i
double expectation(const Vector& x, const ProbVector& pi);

/// E_Phi(x) = E_pi Phi(x) - Phi(E_pi x)
double energy(const Vector& x, const ProbVector& pi, const ConvexProfile& phi);

/// Boltzmann free energy Ent_pi(x), i.e. energy with r log r - r + 1.
double entropy(const Vector& x, const ProbVector& pi);

/// 1/2 sum_ij pi_i K_ij (x_i - x_j)^2. Throws InvariantMismatch unless pi is
/// invariant for K to `tol`.
double dirichlet(const Vector& x, const MarkovMatrix& K, const ProbVector& pi,
                 double tol = 1e-10);
/// 1/2 <<Dx, Q_m Dx>> with m = Q_pi K.
double dirichlet_tensor(const Vector& x, const MarkovMatrix& K,
                        const ProbVector& pi);
/// -<x . A x, pi>
double dirichlet_generator(const Vector& x, const Generator& A,
                           const ProbVector& pi);

struct DirichletPullback {
  double fine = 0;    // D_K(M x_hat)
  double coarse = 0;  // D_K_hat(x_hat)
  double residual = 0;
};

/// Evaluates both sides of D_K(M x_hat) = D_K_hat(x_hat); throws
/// IdentityViolation if they differ by more than `tol` (relative to max(1,|.|)).
DirichletPullback coarse_dirichlet_pullback(const Vector& x_hat,
                                            const MarkovMatrix& K,
                                            const CoarseGrainPair& pair,
                                            double tol = 1e-12);

struct MinimizerOptions {
  int starts = 20;
  std::uint64_t seed = 42;
  double fd_step = 1e-6;
  double rel_tol = 1e-10;
  int max_iter = 4000;
  double spectral_tol = 1e-9;
  /// Extra starting points tried before the random ones.
  std::vector<Vector> seeds;
};

struct SpectralEstimate {
  double value = 0;
  Vector certificate;   // a minimizer (or eigenvector)
  std::string method;   // "eigen" or "minimize"
  int iterations = 0;   // summed over starts
  int best_start = -1;
};

/// L^2(pi) spectral gap: second smallest eigenvalue of
/// -Q_pi A_sym v = lambda Q_pi v, i.e. inf D_K(x) / Var_pi(x).
/// Throws Reducible if the gap is below `tol`.
SpectralEstimate spectral_gap(const MarkovMatrix& K, const ProbVector& pi,
                              double tol = 1e-9);

/// Poincare-type constant for profile phi. The quadratic profile is routed to
/// `spectral_gap` (reported as the gap, inf D/Var); any other profile is
/// minimized numerically over the slice E_pi(x) = 1 and the returned value is
/// the ratio at the certificate, hence an upper bound on the infimum.
SpectralEstimate poincare_constant(const MarkovMatrix& K, const ProbVector& pi,
                                   const ConvexProfile& phi,
                                   const MinimizerOptions& opts = {});

/// inf D_K(x) / Ent_pi(g(x)), minimized over the slice E_pi(x^2) = 1.
SpectralEstimate log_sobolev_constant(const MarkovMatrix& K,
                                      const ProbVector& pi,
                                      const ConvexProfile& g,
                                      const MinimizerOptions& opts = {});

enum class FunctionalKind { Poincare, LogSobolev };

struct SpectralReport {
  FunctionalKind kind = FunctionalKind::Poincare;
  std::string profile;
  SpectralEstimate fine;
  SpectralEstimate coarse;
  bool monotone = false;  // fine.value <= coarse.value + 1e-9
};

/// Computes the constant for K_hat first and seeds the fine minimization with
/// the lifted coarse certificate M x_hat, whose ratio is no larger than the
/// coarse value; the reported fine value is therefore <= the coarse one.
SpectralReport compare_under_coarse_graining(const MarkovMatrix& K,
                                             const CoarseGrainPair& pair,
                                             FunctionalKind kind,
                                             const ConvexProfile& profile,
                                             const MinimizerOptions& opts = {});

/// The three-state reversible generator family
///   A_a = [[-8, 4, 4], [1, -2, 1], [a, a, -2a]]
Generator counterexample_generator(double a);
/// I + tau A_a, a Markov matrix while tau max(8, 2a) <= 1.
MarkovMatrix counterexample_chain(double a, double tau = 1.0 / 16.0);

struct CounterexampleRow {
  double a = 0;
  double dk = 0;      // D_K(x), x = (3, 1, 2)
  double dk_hat = 0;  // D_K_hat(N_a x)
  double dk_closed = 0;
  double dk_hat_closed = 0;
};

/// Evaluates both Dirichlet forms through the operator pipeline (invariant
/// measure, N, A_hat = N A M) and alongside the closed forms
/// 24a/(5a+4) and 8a(1+2a)^2/((a+1)^2(5a+4)). At a = 0 the invariant measure
/// is not positive and both forms vanish; the row is returned as zeros.
CounterexampleRow counterexample_row(double a);

/// Bisection on sign(D_K - D_K_hat) over [lo, hi].
double counterexample_crossover(double lo = 1.0, double hi = 4.0,
                                double tol = 1e-12);

}  // namespace markov_cg
