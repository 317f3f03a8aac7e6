#include "markov_cg/flux_dynamics.hpp"

#include "markov_cg/functionals.hpp"
#include "support.hpp"

using namespace markov_cg;
using markov_cg::testing::incidence_by_definition;
using markov_cg::testing::max_abs;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::Usage;
}

}  // namespace

TEST_CASE("gradient flow right-hand side") {
  Sampler s(1);
  const ReversibleChain c = s.reversible_chain(5);
  CHECK(max_abs(gradient_flow_rhs(c.pi.entries(), c.K, c.pi)) <= 1e-15);
  CHECK(max_abs(flux_of(c.pi.entries(), c.K, c.pi).entries) <= 1e-15);

  const ProbVector pi = s.positive_measure(4);
  const Vector c0 = s.positive_measure(4, 0.0).entries();
  CHECK(max_abs(gradient_flow_rhs(c0, validate_markov(Matrix::Identity(4, 4)), pi)) ==
        0.0);

  Matrix cyc(3, 3);
  cyc << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  CHECK(kind_of([&] {
          gradient_flow_rhs(Vector::Ones(3) / 3, validate_markov(cyc),
                            ProbVector::uniform(3));
        }) == ErrorKind::NotReversible);
}

TEST_CASE("property: gradient flow reproduces the forward equation") {
  Sampler s(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = s.integer(2, 10);
    const ReversibleChain c = s.reversible_chain(n, 0.3);
    const Vector c0 = s.positive_measure(n, 0.0).entries();
    const Vector expected =
        (c.K.entries().transpose() - Matrix::Identity(n, n)) * c0;
    CHECK(max_abs(gradient_flow_rhs(c0, c.K, c.pi) - expected) <= 1e-12);

    // Flux by definition: b_ij = 1/2 pi_i K_ij (rho_i - rho_j).
    const Vector rho = c0.cwiseQuotient(c.pi.entries());
    const Matrix m = c.pi.entries().asDiagonal() * c.K.entries();
    const Matrix b = 0.5 * m.cwiseProduct(incidence_by_definition(rho));
    CHECK(max_abs(flux_of(c0, c.K, c.pi).entries - b) <= 1e-14);
  }
}

TEST_CASE("coarse evolution step") {
  Sampler s(3);
  const ReversibleChain c = s.reversible_chain(6);
  const CoarseGrainPair pair = make_coarse_grain_pair(s.partition(6, 3), c.pi);
  const MarkovMatrix K_hat = coarse_markov(c.K, pair);
  const CoarseStep step = coarse_evolution_step(pair.pi_hat.entries(), K_hat, pair.pi_hat);
  CHECK(max_abs(step.b_hat.entries) <= 1e-15);
  CHECK(max_abs(step.c_hat_dot) <= 1e-15);
}

TEST_CASE("property: flux equilibration") {
  Sampler s(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = s.integer(2, 10);
    const ReversibleChain c = s.reversible_chain(n, 0.3);
    const ClusterMap phi = s.partition(n);
    const CoarseGrainPair pair = make_coarse_grain_pair(phi, c.pi);
    const MarkovMatrix K_hat = coarse_markov(c.K, pair);
    const EdgeTensor m = edge_weight(c.K, c.pi);
    const EdgeReconstruction n_tilde = edge_reconstruct_op(m, restrict(phi, m), phi);

    const Vector c_hat = s.positive_measure(phi.n_hat(), 0.0).entries();
    const CoarseStep step = coarse_evolution_step(c_hat, K_hat, pair.pi_hat);
    const Vector c_fine = reconstruct_adjoint(pair, c_hat);
    const EdgeTensor b = flux_of(c_fine, c.K, c.pi);
    CHECK(max_abs(b.entries - n_tilde.adjoint(step.b_hat).entries) <= 1e-12);
    CHECK(max_abs(restrict(phi, b).entries - step.b_hat.entries) <= 1e-12);
  }
}

TEST_CASE("flux reconstruction") {
  Sampler s(5);
  SUBCASE("zero coarse flux") {
    const ReversibleChain c = s.reversible_chain(5);
    const CoarseGrainPair pair = make_coarse_grain_pair(s.partition(5, 2), c.pi);
    const FluxReconstruction r =
        reconstruct_flux(EdgeTensor{Matrix::Zero(2, 2)}, pair, edge_weight(c.K, c.pi));
    CHECK(max_abs(r.b1.entries) == 0);
    CHECK(max_abs(r.b2.entries) <= 1e-15);
  }
  SUBCASE("flux on a zero-weight block pair is rejected") {
    Matrix K = Matrix::Zero(4, 4);
    K << 0.5, 0.5, 0, 0,
         0.25, 0.5, 0.25, 0,
         0, 0.25, 0.5, 0.25,
         0, 0, 0.5, 0.5;
    const MarkovMatrix chain = validate_markov(K);
    const ProbVector pi = invariant_measure(chain);
    const CoarseGrainPair pair = make_coarse_grain_pair(ClusterMap::make({0, 1, 1, 2}), pi);
    Matrix b_hat = Matrix::Zero(3, 3);
    b_hat(0, 2) = 1.0;
    CHECK(kind_of([&] {
            reconstruct_flux(EdgeTensor{b_hat, TensorRole::Dual}, pair,
                             edge_weight(chain, pi));
          }) == ErrorKind::WeightDegenerate);
  }
  SUBCASE("property: reconstruction identities") {
    for (int trial = 0; trial < 50; ++trial) {
      const int n = s.integer(2, 9);
      const ReversibleChain c = s.reversible_chain(n, 0.3);
      const ClusterMap phi = s.partition(n);
      const CoarseGrainPair pair = make_coarse_grain_pair(phi, c.pi);
      const EdgeTensor m = edge_weight(c.K, c.pi);
      const int n_hat = phi.n_hat();
      // Coarse fluxes live on block pairs with positive weight.
      const Matrix support =
          (restrict(phi, m).entries.array() > 0.0).cast<double>().matrix();
      const EdgeTensor b_hat{
          (s.positive_tensor(n_hat) - s.positive_tensor(n_hat)).cwiseProduct(support),
          TensorRole::Dual};
      const FluxReconstruction r = reconstruct_flux(b_hat, pair, m);

      CHECK(std::abs(r.fredholm) <= 1e-10);
      CHECK(r.residual <= 1e-10);
      CHECK(r.kernel_residual <= 1e-10);

      // Minimum-norm solution in closed form: b2 = D x* / (2n).
      const Matrix b2 = incidence_by_definition(r.x_star) / (2.0 * n);
      CHECK(max_abs(r.b2.entries - b2) <= 1e-10);

      // The total flux has the prescribed divergence.
      const Vector div_hat = incidence_adjoint(b_hat);
      CHECK(max_abs(incidence_adjoint(r.total()) -
                    reconstruct_adjoint(pair, div_hat)) <= 1e-10);
      CHECK(max_abs(incidence_adjoint(restrict(phi, r.total())) - div_hat) <= 1e-10);

      // Linearity of the canonical choice.
      const EdgeTensor other{s.positive_tensor(n_hat).cwiseProduct(support),
                             TensorRole::Dual};
      const EdgeTensor sum{b_hat.entries + 2.0 * other.entries, TensorRole::Dual};
      const FluxReconstruction r_other = reconstruct_flux(other, pair, m);
      const FluxReconstruction r_sum = reconstruct_flux(sum, pair, m);
      CHECK(max_abs(r_sum.total().entries - r.total().entries -
                    2.0 * r_other.total().entries) <= 1e-10);
    }
  }
}

TEST_CASE("evolution") {
  Sampler s(6);
  const ReversibleChain c = s.reversible_chain(4);
  SUBCASE("stationary start") {
    const auto traj = evolve(c.pi, c.K, c.pi, 1.0, 0.1);
    CHECK(traj.size() == 11);
    for (const auto& state : traj) {
      CHECK(max_abs(state.c - c.pi.entries()) <= 1e-14);
    }
  }
  SUBCASE("partial final step") {
    const auto traj = evolve(c.pi, c.K, c.pi, 0.25, 0.1);
    REQUIRE(traj.size() == 4);
    CHECK(traj.back().t == doctest::Approx(0.25));
  }
  SUBCASE("long-time limit is the invariant measure") {
    const double gap = spectral_gap(c.K, c.pi).value;
    const auto traj = evolve(ProbVector::from(Vector::Unit(4, 0)), c.K, c.pi,
                             50.0 / gap, 0.05, Integrator::Exponential);
    CHECK(max_abs(traj.back().c - invariant_measure(c.K).entries()) <= 1e-10);
  }
  SUBCASE("mass is conserved and schemes agree for small steps") {
    const ProbVector c0 = s.positive_measure(4, 0.0);
    const auto euler = evolve(c0, c.K, c.pi, 1.0, 1e-4);
    const auto exact = evolve(c0, c.K, c.pi, 1.0, 0.1, Integrator::Exponential);
    CHECK(euler.back().c.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_abs(euler.back().c - exact.back().c) <= 1e-4);
  }
  SUBCASE("step size limit") {
    CHECK(kind_of([&] { evolve(c.pi, c.K, c.pi, 1.0, 2.0); }) ==
          ErrorKind::StepTooLarge);
    CHECK_NOTHROW(evolve(c.pi, c.K, c.pi, 1.0, 2.0, Integrator::Exponential));
  }
}
