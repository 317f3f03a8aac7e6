#include "markov_cg/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

#include "markov_cg/flux_dynamics.hpp"
#include "markov_cg/functionals.hpp"
#include "markov_cg/random.hpp"

namespace markov_cg {

namespace {

// Tracks the worst value of a quantity against its threshold.
struct Worst {
  double value = 0;
  void see(double v) {
    if (!(v <= value)) value = v;  // NaN propagates
  }
};

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

using Check = std::function<bool(std::string&)>;

CriterionResult run(int id, std::string name, const Check& check) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.passed = check(r.detail);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return r;
}

bool operator_identities(std::uint64_t seed, std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  Sampler s(seed);
  Worst worst;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = s.integer(1, 12);
    const ProbVector pi = s.positive_measure(n);
    const CoarseGrainPair pair = make_coarse_grain_pair(s.partition(n), pi);
    worst.see(identity_residuals(pair).max());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  detail = "max residual " + sci(worst.value) + ", " + sci(secs) + " s";
  return worst.value <= 1e-12 && secs < 5.0;
}

bool closed_form_N(std::string& detail) {
  const ProbVector pi = ProbVector::positive(Vector::Map(
      std::vector<double>{0.2, 0.3, 0.5}.data(), 3));
  const MarkovMatrix N = build_N(ClusterMap::make({0, 1, 1}), pi);
  Matrix expected(2, 3);
  expected << 1, 0, 0, 0, 0.375, 0.625;
  const double err = (N.entries() - expected).cwiseAbs().maxCoeff();
  detail = "max |N - closed form| " + sci(err);
  return err <= 1e-15;
}

bool coarse_chain_suite(std::uint64_t seed, std::string& detail) {
  Sampler s(seed);
  Worst rows, invariance, balance;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = s.integer(2, 10);
    const ReversibleChain chain = s.reversible_chain(n, trial % 2 ? 0.4 : 0.0);
    const CoarseGrainPair pair = make_coarse_grain_pair(s.partition(n), chain.pi);
    const MarkovMatrix K_hat = coarse_markov(chain.K, pair);
    // Row sums before the validating renormalization.
    const Matrix raw = pair.N.entries() * chain.K.entries() * pair.M.entries();
    rows.see((raw.rowwise().sum().array() - 1.0).abs().maxCoeff());
    invariance.see(invariance_residual(K_hat, pair.pi_hat));
    balance.see(detailed_balance_residual(K_hat.entries(),
                                          pair.pi_hat.entries()));
  }
  detail = "row sum " + sci(rows.value) + ", invariance " +
           sci(invariance.value) + ", detailed balance " + sci(balance.value);
  return rows.value <= 1e-11 && invariance.value <= 1e-11 &&
         balance.value <= 1e-11;
}

bool tensor_suite(std::uint64_t seed, std::string& detail) {
  Sampler s(seed);
  Worst restriction, canonical, commutation;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = s.integer(2, 10);
    const ClusterMap phi = s.partition(n);
    // Reversible and non-reversible chains alternate.
    MarkovMatrix K = s.positive_chain(n);
    ProbVector pi = invariant_measure(K);
    if (trial % 2 == 0) {
      ReversibleChain c = s.reversible_chain(n, trial % 4 == 0 ? 0.5 : 0.0);
      K = c.K;
      pi = c.pi;
    }
    const CoarseGrainPair pair = make_coarse_grain_pair(phi, pi);
    const EdgeTensor m = edge_weight(K, pi);
    const EdgeTensor m_hat = restrict(phi, m);
    const MarkovMatrix K_hat = coarse_markov(K, pair);
    const Matrix expected = pair.pi_hat.entries().asDiagonal() * K_hat.entries();
    restriction.see((m_hat.entries - expected).cwiseAbs().maxCoeff());

    const CoarseIncidence from_chain = coarse_incidence(phi, m);
    canonical.see(from_chain.canonical_residual);
    commutation.see(from_chain.commutation_residual);
    const CoarseIncidence ci =
        coarse_incidence(phi, EdgeTensor{s.positive_tensor(n), TensorRole::Dual});
    canonical.see(ci.canonical_residual);
    commutation.see(ci.commutation_residual);
    for (int k = 0; k < 5; ++k) {
      const Vector x_hat = s.vector(phi.n_hat(), -1.0, 1.0);
      Matrix Dhat_x(phi.n_hat(), phi.n_hat());
      const Vector flat = ci.assembled * x_hat;
      for (int p = 0; p < phi.n_hat(); ++p) {
        for (int q = 0; q < phi.n_hat(); ++q) {
          Dhat_x(p, q) = flat(p * phi.n_hat() + q);
        }
      }
      const EdgeTensor lifted = lift(phi, EdgeTensor{Dhat_x});
      const EdgeTensor direct = incidence_apply(lift_function(phi, x_hat));
      commutation.see((lifted.entries - direct.entries).cwiseAbs().maxCoeff());
    }
  }
  detail = "restrict(Q_pi K) - Q_pi_hat K_hat " + sci(restriction.value) +
           ", D_hat vs canonical " + sci(canonical.value) +
           ", M~ D_hat - D M " + sci(commutation.value);
  return restriction.value <= 1e-12 && canonical.value <= 1e-12 &&
         commutation.value <= 1e-12;
}

bool gradient_flow_identity(std::uint64_t seed, std::string& detail) {
  Sampler s(seed);
  Worst worst;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = s.integer(1, 10);
    const ReversibleChain chain = s.reversible_chain(n, trial % 3 ? 0.0 : 0.5);
    const Vector c = s.positive_measure(n).entries();
    const Vector expected = chain.K.entries().transpose() * c - c;
    worst.see((gradient_flow_rhs(c, chain.K, chain.pi) - expected)
                  .cwiseAbs()
                  .maxCoeff());
  }
  detail = "max ||(A* + 1/2 D* Q_m D Q_pi^-1) c|| " + sci(worst.value);
  return worst.value <= 1e-10;
}

bool flux_reconstruction(std::uint64_t seed, std::string& detail) {
  Sampler s(seed);
  Worst fredholm, residual, kernel, linearity;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = s.integer(2, 10);
    const ReversibleChain chain = s.reversible_chain(n);
    const CoarseGrainPair pair = make_coarse_grain_pair(s.partition(n), chain.pi);
    const EdgeTensor m = edge_weight(chain.K, chain.pi);
    const int n_hat = pair.n_hat();
    const EdgeTensor b1{s.vector(n_hat * n_hat, -1, 1).reshaped(n_hat, n_hat),
                        TensorRole::Dual};
    const EdgeTensor b2{s.vector(n_hat * n_hat, -1, 1).reshaped(n_hat, n_hat),
                        TensorRole::Dual};
    const double alpha = s.uniform(-2, 2);
    const double beta = s.uniform(-2, 2);
    const EdgeTensor mix{alpha * b1.entries + beta * b2.entries,
                         TensorRole::Dual};

    const FluxReconstruction r1 = reconstruct_flux(b1, pair, m);
    const FluxReconstruction r2 = reconstruct_flux(b2, pair, m);
    const FluxReconstruction rm = reconstruct_flux(mix, pair, m);
    for (const auto* r : {&r1, &r2, &rm}) {
      fredholm.see(std::abs(r->fredholm));
      residual.see(r->residual);
      kernel.see(r->kernel_residual);
    }
    linearity.see((rm.b2.entries - alpha * r1.b2.entries - beta * r2.b2.entries)
                      .cwiseAbs()
                      .maxCoeff());
  }
  detail = "Fredholm " + sci(fredholm.value) + ", LS residual " +
           sci(residual.value) + ", kernel " + sci(kernel.value) +
           ", superposition " + sci(linearity.value);
  return fredholm.value <= 1e-10 && residual.value <= 1e-8 &&
         kernel.value <= 1e-10 && linearity.value <= 1e-10;
}

bool functional_inequalities(std::uint64_t seed, std::string& detail) {
  Sampler s(seed);
  const std::vector<ConvexProfile> profiles = {
      ConvexProfile::quadratic(), ConvexProfile::boltzmann(),
      ConvexProfile::smoothed_power(1.5), ConvexProfile::quartic()};
  const std::vector<ConvexProfile> transforms = {
      ConvexProfile::square(), ConvexProfile::smoothed_power(1.5),
      ConvexProfile::quartic()};
  Worst pullback, contraction, entropy_gap, dirichlet_gap;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = s.integer(2, 10);
    const ReversibleChain chain = s.reversible_chain(n);
    const CoarseGrainPair pair = make_coarse_grain_pair(s.partition(n), chain.pi);
    const ConvexProfile& phi = profiles[static_cast<size_t>(trial) % profiles.size()];
    const ConvexProfile& g =
        transforms[static_cast<size_t>(trial) % transforms.size()];

    const Vector x_hat = s.vector(pair.n_hat(), 0.1, 2.0);
    const Vector x = s.vector(n, 0.1, 2.0);
    const Vector Mx_hat = lift_function(pair.phi, x_hat);

    pullback.see(std::abs(energy(Mx_hat, pair.pi, phi) -
                          energy(x_hat, pair.pi_hat, phi)));
    contraction.see(energy(reconstruct(pair, x), pair.pi_hat, phi) -
                    energy(x, pair.pi, phi));

    const Vector y_hat = s.vector(pair.n_hat(), -2.0, 2.0);
    const Vector My_hat = lift_function(pair.phi, y_hat);
    Vector g_hat(y_hat.size()), g_fine(My_hat.size());
    for (Eigen::Index i = 0; i < y_hat.size(); ++i) g_hat(i) = g(y_hat(i));
    for (Eigen::Index i = 0; i < My_hat.size(); ++i) g_fine(i) = g(My_hat(i));
    entropy_gap.see(entropy(g_hat, pair.pi_hat) - entropy(g_fine, pair.pi));

    dirichlet_gap.see(
        coarse_dirichlet_pullback(y_hat, chain.K, pair, 1e-12).residual);
  }
  detail = "E(Mx) - E_hat(x) " + sci(pullback.value) + ", E_hat(Nx) - E(x) " +
           sci(contraction.value) + ", Ent_hat - Ent " +
           sci(entropy_gap.value) + ", D_K(Mx) - D_K_hat(x) " +
           sci(dirichlet_gap.value);
  return pullback.value <= 1e-12 && contraction.value <= 1e-12 &&
         entropy_gap.value <= 1e-12 && dirichlet_gap.value <= 1e-12;
}

bool spectral_monotonicity(std::uint64_t seed, std::string& detail) {
  Sampler s(seed);
  Worst excess, two_state;
  const ConvexProfile quadratic = ConvexProfile::quadratic();
  for (int trial = 0; trial < 50; ++trial) {
    const int n = s.integer(3, 10);
    const ReversibleChain chain = s.reversible_chain(n);
    const CoarseGrainPair pair =
        make_coarse_grain_pair(s.partition(n, s.integer(2, n - 1)), chain.pi);
    const SpectralReport r = compare_under_coarse_graining(
        chain.K, pair, FunctionalKind::Poincare, quadratic);
    excess.see(r.fine.value - r.coarse.value);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const double p = s.uniform(0.01, 1.0);
    const double q = s.uniform(0.01, 1.0);
    Matrix K(2, 2);
    K << 1 - p, p, q, 1 - q;
    const MarkovMatrix chain = validate_markov(K);
    const ProbVector pi = invariant_measure(chain);
    two_state.see(std::abs(spectral_gap(chain, pi).value - (p + q)));
  }
  detail = "max lambda - lambda_hat " + sci(excess.value) +
           ", two-state |gap - (p+q)| " + sci(two_state.value);
  return excess.value <= 1e-9 && two_state.value <= 1e-12;
}

bool counterexample(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  Worst closed;
  for (double a : {0.5, 1.0, 2.0, 3.0, 4.0}) {
    const CounterexampleRow r = counterexample_row(a);
    closed.see(std::abs(r.dk - r.dk_closed));
    closed.see(std::abs(r.dk_hat - r.dk_hat_closed));
  }
  const double a_star = counterexample_crossover(1.0, 4.0);
  const CounterexampleRow at1 = counterexample_row(1.0);
  const CounterexampleRow at4 = counterexample_row(4.0);
  const bool signs = at1.dk - at1.dk_hat > 0.0 && at4.dk - at4.dk_hat < 0.0;
  const double crossover_err = std::abs(a_star - (1.0 + std::sqrt(3.0)));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::ostringstream os;
  os << "closed-form error " << sci(closed.value) << ", a* = "
     << std::setprecision(10) << a_star << " (error " << sci(crossover_err)
     << "), sign(+ at 1, - at 4) " << (signs ? "ok" : "wrong") << ", "
     << sci(secs) << " s";
  detail = os.str();
  return closed.value <= 1e-10 && crossover_err <= 1e-6 && signs && secs < 1.0;
}

bool uniform_moore_penrose(std::uint64_t seed, std::string& detail) {
  Sampler s(seed);
  Worst worst;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = s.integer(1, 12);
    const ClusterMap phi = s.partition(n);
    const MarkovMatrix N = build_N(phi, ProbVector::uniform(n));
    worst.see((N.entries() - moore_penrose_of_M(build_M(phi)))
                  .cwiseAbs()
                  .maxCoeff());
  }
  detail = "max |N - (M*M)^-1 M*| " + sci(worst.value);
  return worst.value <= 1e-12;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::uint64_t seed) {
  std::vector<CriterionResult> out;
  out.push_back(run(1, "operator identity suite", [&](std::string& d) {
    return operator_identities(seed, d);
  }));
  out.push_back(run(2, "closed-form reconstruction N", closed_form_N));
  out.push_back(run(3, "coarse-chain suite", [&](std::string& d) {
    return coarse_chain_suite(seed + 3, d);
  }));
  out.push_back(run(4, "tensor suite", [&](std::string& d) {
    return tensor_suite(seed + 4, d);
  }));
  out.push_back(run(5, "gradient-flow identity", [&](std::string& d) {
    return gradient_flow_identity(seed + 5, d);
  }));
  out.push_back(run(6, "flux reconstruction", [&](std::string& d) {
    return flux_reconstruction(seed + 6, d);
  }));
  out.push_back(run(7, "functional inequalities", [&](std::string& d) {
    return functional_inequalities(seed + 7, d);
  }));
  out.push_back(run(8, "spectral monotonicity", [&](std::string& d) {
    return spectral_monotonicity(seed + 8, d);
  }));
  out.push_back(run(9, "counterexample reproduction", counterexample));
  out.push_back(run(10, "uniform-measure Moore-Penrose", [&](std::string& d) {
    return uniform_moore_penrose(seed + 10, d);
  }));
  return out;
}

bool print_acceptance(const std::vector<CriterionResult>& results,
                      std::ostream& out) {
  bool all = true;
  for (const CriterionResult& r : results) {
    out << (r.passed ? "[PASS] " : "[FAIL] ") << std::setw(2) << r.id << ' '
        << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  return all;
}

}  // namespace markov_cg
