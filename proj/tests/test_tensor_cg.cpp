#include "markov_cg/tensor_cg.hpp"

#include "support.hpp"

using namespace markov_cg;
using markov_cg::testing::incidence_by_definition;
using markov_cg::testing::max_abs;

TEST_CASE("edge weight") {
  Sampler s(1);
  const ProbVector pi = s.positive_measure(4);
  const EdgeTensor m = edge_weight(validate_markov(Matrix::Identity(4, 4)), pi);
  CHECK(max_abs(m.entries - Matrix(pi.entries().asDiagonal())) == 0);
  CHECK(m.role == TensorRole::Dual);

  const MarkovMatrix K = s.positive_chain(4);
  CHECK_THROWS_AS(edge_weight(K, ProbVector::uniform(4)), Error);
}

TEST_CASE("lift and restrict") {
  const ClusterMap phi = ClusterMap::make({0, 1, 1, 2});
  const EdgeTensor ones_hat{Matrix::Ones(3, 3)};
  CHECK(max_abs(lift(phi, ones_hat).entries - Matrix::Ones(4, 4)) == 0);

  Sampler s(2);
  const EdgeTensor b{s.positive_tensor(4)};
  const ClusterMap id = ClusterMap::identity(4);
  CHECK(max_abs(lift(id, b).entries - b.entries) == 0);
  CHECK(max_abs(restrict(id, b).entries - b.entries) == 0);

  // restrict is the adjoint of lift under the plain pairing.
  const EdgeTensor b_hat{s.positive_tensor(3)};
  CHECK(tensor_pairing(lift(phi, b_hat), b) ==
        doctest::Approx(tensor_pairing(b_hat, restrict(phi, b))).epsilon(1e-14));
}

TEST_CASE("edge reconstruction") {
  Sampler s(3);
  const ClusterMap phi = ClusterMap::make({0, 0, 1, 1, 1});
  const EdgeTensor m{s.positive_tensor(5), TensorRole::Dual};
  const EdgeTensor m_hat = restrict(phi, m);
  const EdgeReconstruction n_tilde = edge_reconstruct_op(m, m_hat, phi);

  SUBCASE("maps ones to ones") {
    CHECK(max_abs(n_tilde.apply(EdgeTensor{Matrix::Ones(5, 5)}).entries -
                  Matrix::Ones(2, 2)) <= 1e-15);
  }
  SUBCASE("is a left inverse of lift") {
    const EdgeTensor b_hat{s.positive_tensor(2)};
    CHECK(max_abs(n_tilde.apply(lift(phi, b_hat)).entries - b_hat.entries) <=
          1e-14);
  }
  SUBCASE("adjointness against weighted pairings") {
    const EdgeTensor b{s.positive_tensor(5)};
    const EdgeTensor p_hat{s.positive_tensor(2)};
    CHECK(tensor_pairing(n_tilde.apply(b), p_hat) ==
          doctest::Approx(tensor_pairing(b, n_tilde.adjoint(p_hat))).epsilon(1e-13));
  }
  SUBCASE("identity partition") {
    const ClusterMap id = ClusterMap::identity(5);
    const EdgeReconstruction op = edge_reconstruct_op(m, m, id);
    const EdgeTensor b{s.positive_tensor(5)};
    CHECK(max_abs(op.apply(b).entries - b.entries) <= 1e-15);
  }
  SUBCASE("mismatched weight is rejected") {
    EdgeTensor wrong = m_hat;
    wrong.entries(0, 1) *= 2.0;
    try {
      edge_reconstruct_op(m, wrong, phi);
      FAIL("expected WeightMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::WeightMismatch);
    }
  }
  SUBCASE("zero block weights map to zero") {
    EdgeTensor sparse = m;
    sparse.entries.block(0, 2, 2, 3).setZero();
    const EdgeReconstruction op =
        edge_reconstruct_op(sparse, restrict(phi, sparse), phi);
    const EdgeTensor out = op.apply(EdgeTensor{Matrix::Ones(5, 5)});
    CHECK(out.entries(0, 1) == 0.0);
    CHECK(out.entries(1, 0) == doctest::Approx(1.0));
    CHECK(max_abs(op.adjoint(EdgeTensor{Matrix::Ones(2, 2)}).entries.block(0, 2, 2, 3)) ==
          0.0);
  }
}

TEST_CASE("incidence operator") {
  CHECK(max_abs(incidence_apply(Vector::Ones(4)).entries) == 0);
  Matrix e1(2, 2);
  e1 << 0, 1, -1, 0;
  CHECK(max_abs(incidence_apply(Vector::Unit(2, 0)).entries - e1) == 0);

  Matrix E12 = Matrix::Zero(3, 3);
  E12(0, 1) = 1;
  Vector expected(3);
  expected << 1, -1, 0;
  CHECK(max_abs(incidence_adjoint(EdgeTensor{E12}) - expected) == 0);

  Sampler s(4);
  const Matrix sym = [&] {
    Matrix a = s.positive_tensor(4);
    return Matrix(a + a.transpose());
  }();
  CHECK(max_abs(incidence_adjoint(EdgeTensor{sym})) <= 1e-15);

  for (int trial = 0; trial < 20; ++trial) {
    const int n = s.integer(1, 8);
    const Vector x = s.vector(n, -2, 2);
    const EdgeTensor b{s.positive_tensor(n) - s.positive_tensor(n)};
    const IncidenceOperator D(n);
    CHECK(max_abs(D.apply(x).entries - incidence_by_definition(x)) == 0);
    CHECK(tensor_pairing(D.apply(x), b) ==
          doctest::Approx(x.dot(D.adjoint(b))).epsilon(1e-13));
    const Vector flat = D.dense() * x;
    CHECK(max_abs(flat - D.apply(x).entries.transpose().reshaped()) == 0);
  }
}

TEST_CASE("coarse incidence") {
  Sampler s(5);
  SUBCASE("identity partition") {
    const EdgeTensor m{s.positive_tensor(4), TensorRole::Dual};
    const CoarseIncidence ci = coarse_incidence(ClusterMap::identity(4), m);
    CHECK(max_abs(ci.assembled - IncidenceOperator(4).dense()) <= 1e-15);
  }
  SUBCASE("property: canonical incidence and commutation") {
    for (int trial = 0; trial < 50; ++trial) {
      const int n = s.integer(2, 10);
      const ReversibleChain c = s.reversible_chain(n, 0.4);
      const ClusterMap phi = s.partition(n);
      const CoarseIncidence ci = coarse_incidence(phi, edge_weight(c.K, c.pi));
      CHECK(ci.canonical_residual <= 1e-12);
      CHECK(ci.commutation_residual <= 1e-12);
    }
  }
}

TEST_CASE("quotient graph") {
  Sampler s(6);
  SUBCASE("complete chain") {
    const QuotientGraph g =
        quotient_graph(s.positive_chain(5), ClusterMap::make({0, 1, 2, 1, 0}));
    CHECK(g.edges.size() == 6);
    for (int k = 0; k < 3; ++k) CHECK(!g.has_edge(k, k));
  }
  SUBCASE("three-state family") {
    const QuotientGraph g =
        quotient_graph(counterexample_chain(1.0), ClusterMap::make({0, 1, 1}));
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 0));
    CHECK(g.symmetrized().size() == 1);
  }
  SUBCASE("block diagonal chain") {
    Matrix K = Matrix::Zero(4, 4);
    K.block(0, 0, 2, 2).setConstant(0.5);
    K.block(2, 2, 2, 2).setConstant(0.5);
    const QuotientGraph g =
        quotient_graph(validate_markov(K), ClusterMap::make({0, 0, 1, 1}));
    CHECK(g.edges.empty());
  }
}

TEST_CASE("property: restriction of the edge weight is the coarse edge weight") {
  Sampler s(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = s.integer(2, 10);
    const ReversibleChain c = s.reversible_chain(n, 0.3);
    const ClusterMap phi = s.partition(n);
    const CoarseGrainPair pair = make_coarse_grain_pair(phi, c.pi);
    const MarkovMatrix K_hat = coarse_markov(c.K, pair);
    const EdgeTensor m_hat = restrict(phi, edge_weight(c.K, c.pi));
    const Matrix expected = pair.pi_hat.entries().asDiagonal() * K_hat.entries();
    CHECK(max_abs(m_hat.entries - expected) <= 1e-12);
  }
}
