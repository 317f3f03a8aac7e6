#include "markov_cg/markov_core.hpp"

#include "markov_cg/functionals.hpp"
#include "support.hpp"

using namespace markov_cg;
using markov_cg::testing::max_abs;
using markov_cg::testing::power_iteration;

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

TEST_CASE("validate_markov accepts row-stochastic matrices") {
  CHECK_NOTHROW(validate_markov(Matrix::Identity(3, 3)));
  Matrix K(2, 2);
  K << 0.5, 0.5, 0.2, 0.8;
  const MarkovMatrix m = validate_markov(K);
  CHECK(m(1, 1) == doctest::Approx(0.8));
}

TEST_CASE("validate_markov rejects bad rows") {
  Matrix K(2, 2);
  K << 0.5, 0.6, 0.2, 0.8;
  CHECK(kind_of([&] { validate_markov(K); }) == ErrorKind::RowSumViolation);
  try {
    validate_markov(K);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("1.1") != std::string::npos);
  }
  K << 1.1, -0.1, 0.2, 0.8;
  CHECK(kind_of([&] { validate_markov(K); }) == ErrorKind::NegativeEntry);
  CHECK(kind_of([&] { validate_markov(Matrix::Identity(2, 3)); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("rectangular Markov matrices are allowed") {
  Matrix M(3, 2);
  M << 1, 0, 0, 1, 0, 1;
  const MarkovMatrix m = MarkovMatrix::validate(M);
  CHECK(!m.is_square());
}

TEST_CASE("ProbVector validation") {
  Vector v(3);
  v << 0.2, 0.3, 0.5;
  CHECK(ProbVector::positive(v).is_positive());
  v << 0.5, 0.5, 0.0;
  const ProbVector p = ProbVector::from(v);
  CHECK(!p.is_positive());
  CHECK(kind_of([&] { p.require_positive(); }) ==
        ErrorKind::NonPositiveInvariant);
  v << 0.5, 0.6, 0.0;
  CHECK_THROWS_AS(ProbVector::from(v), Error);
  CHECK(ProbVector::uniform(4)(2) == doctest::Approx(0.25));
}

TEST_CASE("invariant measure") {
  SUBCASE("identity is not uniquely ergodic") {
    CHECK(kind_of([] { invariant_measure(validate_markov(Matrix::Identity(2, 2))); }) ==
          ErrorKind::NonUniqueInvariant);
  }
  SUBCASE("three-state family at a = 1") {
    const ProbVector pi = invariant_measure(counterexample_chain(1.0));
    CHECK(pi(0) == doctest::Approx(1.0 / 9).epsilon(1e-12));
    CHECK(pi(1) == doctest::Approx(4.0 / 9).epsilon(1e-12));
    CHECK(pi(2) == doctest::Approx(4.0 / 9).epsilon(1e-12));
  }
  SUBCASE("random chains agree with power iteration") {
    Sampler s(7);
    for (int trial = 0; trial < 10; ++trial) {
      const MarkovMatrix K = s.positive_chain(5);
      const ProbVector pi = invariant_measure(K);
      CHECK(invariance_residual(K, pi) <= 1e-10);
      CHECK((pi.entries() - power_iteration(K.entries())).cwiseAbs().maxCoeff() <=
            1e-10);
    }
  }
  SUBCASE("single state") {
    const ProbVector pi = invariant_measure(validate_markov(Matrix::Ones(1, 1)));
    CHECK(pi(0) == 1.0);
  }
  SUBCASE("generator overload matches chain overload") {
    Sampler s(8);
    const MarkovMatrix K = s.positive_chain(4);
    const ProbVector a = invariant_measure(K);
    const ProbVector b = invariant_measure(generator_of(K));
    CHECK(max_abs(a.entries() - b.entries()) <= 1e-12);
  }
}

TEST_CASE("detailed balance") {
  Matrix S(3, 3);
  S << 0.2, 0.5, 0.3, 0.5, 0.1, 0.4, 0.3, 0.4, 0.3;
  CHECK(is_detailed_balance(validate_markov(S), ProbVector::uniform(3)));

  for (double a : {0.5, 1.0, 3.0}) {
    const ProbVector pi = invariant_measure(counterexample_generator(a));
    CHECK(is_detailed_balance(counterexample_generator(a), pi));
    CHECK(is_detailed_balance(counterexample_chain(a), pi));
  }

  Matrix C(3, 3);
  C << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  CHECK(!is_detailed_balance(validate_markov(C), ProbVector::uniform(3)));
}

TEST_CASE("generator_of") {
  CHECK(max_abs(generator_of(validate_markov(Matrix::Identity(3, 3))).entries()) ==
        0.0);
  Matrix K(2, 2);
  K << 0.5, 0.5, 0.2, 0.8;
  Matrix A(2, 2);
  A << -0.5, 0.5, 0.2, -0.2;
  CHECK(max_abs(generator_of(validate_markov(K)).entries() - A) <= 1e-15);
  Matrix bad(2, 2);
  bad << -1, 0.5, 0.2, -0.2;
  CHECK_THROWS_AS(Generator::validate(bad), Error);
}

TEST_CASE("chain_step") {
  Sampler s(3);
  const MarkovMatrix K = s.positive_chain(4);
  const ProbVector pi = invariant_measure(K);
  CHECK(max_abs(chain_step(K, pi).entries() - pi.entries()) <= 1e-12);

  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  const ProbVector p = chain_step(validate_markov(swap),
                                  ProbVector::from(Vector::Unit(2, 0)));
  CHECK(p(0) == 0.0);
  CHECK(p(1) == 1.0);
}

TEST_CASE("relative density") {
  Sampler s(5);
  const ProbVector pi = s.positive_measure(4);
  CHECK(max_abs(relative_density(pi, pi).entries - Vector::Ones(4)) <= 1e-15);

  const DensityVector rho = relative_density(ProbVector::from(Vector::Unit(2, 0)),
                                             ProbVector::uniform(2));
  CHECK(rho.entries(0) == doctest::Approx(2.0));
  CHECK(rho.entries(1) == 0.0);

  for (int trial = 0; trial < 20; ++trial) {
    const ProbVector p = s.positive_measure(4, 0.0);
    const Vector back = pi.entries().cwiseProduct(relative_density(p, pi).entries);
    CHECK(max_abs(back - p.entries()) <= 1e-15);
  }
}

TEST_CASE("property: random reversible chains") {
  Sampler s(11);
  for (int trial = 0; trial < 50; ++trial) {
    const ReversibleChain c = s.reversible_chain(s.integer(2, 9), 0.3);
    CHECK(max_abs(c.K.entries().rowwise().sum() - Vector::Ones(c.K.rows())) <=
          1e-12);
    CHECK(invariance_residual(c.K, c.pi) <= 1e-12);
    CHECK(detailed_balance_residual(c.K.entries(), c.pi.entries()) <= 1e-12);
    CHECK(max_abs(invariant_measure(c.K).entries() - c.pi.entries()) <= 1e-10);
  }
}
