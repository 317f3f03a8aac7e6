#include "markov_cg/tensor_cg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace markov_cg {

namespace {

constexpr double kZeroWeight = 1e-14;
constexpr double kNumeratorFloor = 1e-12;

void require_square(const EdgeTensor& t, Eigen::Index n, const char* what) {
  if (t.entries.rows() != n || t.entries.cols() != n) {
    std::ostringstream os;
    os << what << ": expected " << n << "x" << n << " tensor, got "
       << t.entries.rows() << "x" << t.entries.cols();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

}  // namespace

double tensor_pairing(const EdgeTensor& a, const EdgeTensor& b) {
  if (a.entries.rows() != b.entries.rows() ||
      a.entries.cols() != b.entries.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "tensor_pairing: shape mismatch");
  }
  return a.entries.cwiseProduct(b.entries).sum();
}

EdgeTensor edge_weight(const MarkovMatrix& K, const ProbVector& pi, double tol) {
  const double residual = invariance_residual(K, pi);
  if (residual > tol) {
    std::ostringstream os;
    os << "||K* pi - pi||_inf = " << residual << " > " << tol;
    throw Error(ErrorKind::InvariantMismatch, os.str());
  }
  return EdgeTensor{pi.entries().asDiagonal() * K.entries(), TensorRole::Dual};
}

EdgeTensor lift(const ClusterMap& phi, const EdgeTensor& b_hat) {
  require_square(b_hat, phi.n_hat(), "lift");
  const int n = phi.n();
  Matrix out(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) out(i, j) = b_hat.entries(phi[i], phi[j]);
  }
  return EdgeTensor{std::move(out), b_hat.role};
}

EdgeTensor restrict(const ClusterMap& phi, const EdgeTensor& b) {
  require_square(b, phi.n(), "restrict");
  const int n = phi.n();
  Matrix out = Matrix::Zero(phi.n_hat(), phi.n_hat());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) out(phi[i], phi[j]) += b.entries(i, j);
  }
  return EdgeTensor{std::move(out), b.role};
}

EdgeReconstruction::EdgeReconstruction(ClusterMap phi, EdgeTensor m,
                                       EdgeTensor m_hat)
    : phi_(std::move(phi)), m_(std::move(m)), m_hat_(std::move(m_hat)) {}

EdgeTensor EdgeReconstruction::apply(const EdgeTensor& b) const {
  require_square(b, phi_.n(), "N~ apply");
  const EdgeTensor numerator =
      restrict(phi_, EdgeTensor{m_.entries.cwiseProduct(b.entries)});
  const auto n_hat = phi_.n_hat();
  Matrix out = Matrix::Zero(n_hat, n_hat);
  for (int l = 0; l < n_hat; ++l) {
    for (int k = 0; k < n_hat; ++k) {
      const double w = m_hat_.entries(k, l);
      const double num = numerator.entries(k, l);
      if (w <= kZeroWeight) {
        if (std::abs(num) > kNumeratorFloor) {
          std::ostringstream os;
          os << "block pair (" << k << "," << l << ") has weight " << w
             << " but weighted flux " << num;
          throw Error(ErrorKind::WeightDegenerate, os.str());
        }
        continue;
      }
      out(k, l) = num / w;
    }
  }
  return EdgeTensor{std::move(out), b.role};
}

EdgeTensor EdgeReconstruction::adjoint(const EdgeTensor& b_hat) const {
  require_square(b_hat, phi_.n_hat(), "N~* apply");
  const int n = phi_.n();
  Matrix out = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double w = m_hat_.entries(phi_[i], phi_[j]);
      if (w > kZeroWeight) {
        out(i, j) = m_.entries(i, j) * b_hat.entries(phi_[i], phi_[j]) / w;
      }
    }
  }
  return EdgeTensor{std::move(out), b_hat.role};
}

EdgeReconstruction edge_reconstruct_op(const EdgeTensor& m,
                                       const EdgeTensor& m_hat,
                                       const ClusterMap& phi) {
  require_square(m, phi.n(), "edge_reconstruct_op m");
  require_square(m_hat, phi.n_hat(), "edge_reconstruct_op m_hat");
  if ((m.entries.array() < 0.0).any()) {
    throw Error(ErrorKind::NegativeEntry, "edge weights must be nonnegative");
  }
  const double mismatch =
      (restrict(phi, m).entries - m_hat.entries).cwiseAbs().maxCoeff();
  if (mismatch > 1e-12) {
    std::ostringstream os;
    os << "m_hat differs from restrict(m) by " << mismatch;
    throw Error(ErrorKind::WeightMismatch, os.str());
  }
  return EdgeReconstruction(phi, m, m_hat);
}

EdgeTensor IncidenceOperator::apply(const Vector& x) const {
  if (x.size() != n_) {
    throw Error(ErrorKind::DimensionMismatch, "incidence: length mismatch");
  }
  Matrix out(n_, n_);
  for (Eigen::Index j = 0; j < n_; ++j) {
    out.col(j) = x.array() - x(j);
  }
  return EdgeTensor{std::move(out), TensorRole::Primal};
}

Vector IncidenceOperator::adjoint(const EdgeTensor& b) const {
  require_square(b, n_, "incidence adjoint");
  // Diagonal terms cancel in row sum minus column sum.
  return b.entries.rowwise().sum() - b.entries.colwise().sum().transpose();
}

Matrix IncidenceOperator::dense() const {
  Matrix D = Matrix::Zero(n_ * n_, n_);
  for (Eigen::Index i = 0; i < n_; ++i) {
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (i == j) continue;
      D(i * n_ + j, i) += 1.0;
      D(i * n_ + j, j) -= 1.0;
    }
  }
  return D;
}

EdgeTensor incidence_apply(const Vector& x) {
  return IncidenceOperator(x.size()).apply(x);
}

Vector incidence_adjoint(const EdgeTensor& b) {
  return IncidenceOperator(b.n()).adjoint(b);
}

CoarseIncidence coarse_incidence(const ClusterMap& phi, const EdgeTensor& m) {
  const EdgeTensor m_hat = restrict(phi, m);
  const EdgeReconstruction n_tilde = edge_reconstruct_op(m, m_hat, phi);
  const int n = phi.n();
  const int n_hat = phi.n_hat();
  const IncidenceOperator D(n);
  const IncidenceOperator D_hat(n_hat);

  CoarseIncidence result{D_hat, Matrix::Zero(n_hat * n_hat, n_hat), 0.0, 0.0};
  for (int k = 0; k < n_hat; ++k) {
    const Vector e_hat = Vector::Unit(n_hat, k);
    const EdgeTensor column = n_tilde.apply(D.apply(lift_function(phi, e_hat)));
    const EdgeTensor canonical = D_hat.apply(e_hat);
    for (int q = 0; q < n_hat; ++q) {
      for (int p = 0; p < n_hat; ++p) {
        result.assembled(p * n_hat + q, k) = column.entries(p, q);
        if (m_hat.entries(p, q) > kZeroWeight) {
          result.canonical_residual =
              std::max(result.canonical_residual,
                       std::abs(column.entries(p, q) - canonical.entries(p, q)));
        }
      }
    }
    // M~ D_hat e_hat_k against D M e_hat_k.
    const EdgeTensor lifted = lift(phi, column);
    const EdgeTensor direct = D.apply(lift_function(phi, e_hat));
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (m_hat.entries(phi[i], phi[j]) <= kZeroWeight) continue;
        result.commutation_residual =
            std::max(result.commutation_residual,
                     std::abs(lifted.entries(i, j) - direct.entries(i, j)));
      }
    }
  }
  return result;
}

bool QuotientGraph::has_edge(int k, int l) const {
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(k, l));
}

std::vector<std::pair<int, int>> QuotientGraph::symmetrized() const {
  std::vector<std::pair<int, int>> out;
  for (const auto& [k, l] : edges) {
    out.emplace_back(std::min(k, l), std::max(k, l));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

QuotientGraph quotient_graph(const MarkovMatrix& K, const ClusterMap& phi) {
  if (K.rows() != phi.n() || !K.is_square()) {
    throw Error(ErrorKind::DimensionMismatch, "quotient_graph: size mismatch");
  }
  const int n_hat = phi.n_hat();
  std::vector<char> adjacent(static_cast<size_t>(n_hat * n_hat), 0);
  for (int i = 0; i < phi.n(); ++i) {
    for (int j = 0; j < phi.n(); ++j) {
      if (K(i, j) > 0.0 && phi[i] != phi[j]) {
        adjacent[static_cast<size_t>(phi[i] * n_hat + phi[j])] = 1;
      }
    }
  }
  QuotientGraph g;
  g.n_hat = n_hat;
  g.membership = phi.assignment();
  for (int k = 0; k < n_hat; ++k) {
    for (int l = 0; l < n_hat; ++l) {
      if (adjacent[static_cast<size_t>(k * n_hat + l)]) g.edges.emplace_back(k, l);
    }
  }
  return g;
}

}  // namespace markov_cg
