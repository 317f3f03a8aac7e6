#include "markov_cg/coarse_grain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace markov_cg {

namespace {

void require_size(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    std::ostringstream os;
    os << what << ": expected length " << want << ", got " << got;
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

// X M : sums the columns of X over blocks.
Matrix sum_columns_by_block(const ClusterMap& phi, const Matrix& X) {
  Matrix out = Matrix::Zero(X.rows(), phi.n_hat());
  for (int j = 0; j < phi.n(); ++j) out.col(phi[j]) += X.col(j);
  return out;
}

// N Y : pi-weighted average of the rows of Y over blocks.
Matrix average_rows_by_block(const CoarseGrainPair& pair, const Matrix& Y) {
  Matrix out = Matrix::Zero(pair.n_hat(), Y.cols());
  for (int i = 0; i < pair.n(); ++i) {
    const int k = pair.phi[i];
    out.row(k) += (pair.pi(i) / pair.pi_hat(k)) * Y.row(i);
  }
  return out;
}

}  // namespace

ClusterMap::ClusterMap(std::vector<int> assignment, int n_hat)
    : assignment_(std::move(assignment)), n_hat_(n_hat), blocks_(n_hat) {
  for (int i = 0; i < n(); ++i) {
    blocks_[static_cast<size_t>(assignment_[static_cast<size_t>(i)])]
        .push_back(i);
  }
}

ClusterMap ClusterMap::make(std::vector<int> assignment, int n_hat) {
  if (assignment.empty()) {
    throw Error(ErrorKind::InvalidInput, "empty cluster assignment");
  }
  const int max_label = *std::max_element(assignment.begin(), assignment.end());
  if (n_hat < 0) n_hat = max_label + 1;
  std::vector<bool> hit(static_cast<size_t>(n_hat), false);
  for (size_t i = 0; i < assignment.size(); ++i) {
    const int k = assignment[i];
    if (k < 0 || k >= n_hat) {
      std::ostringstream os;
      os << "state " << i << " assigned to cluster " << k
         << " outside [0, " << n_hat << ")";
      throw Error(ErrorKind::InvalidInput, os.str());
    }
    hit[static_cast<size_t>(k)] = true;
  }
  for (int k = 0; k < n_hat; ++k) {
    if (!hit[static_cast<size_t>(k)]) {
      std::ostringstream os;
      os << "cluster " << k << " has no states";
      throw Error(ErrorKind::NotSurjective, os.str());
    }
  }
  return ClusterMap(std::move(assignment), n_hat);
}

ClusterMap ClusterMap::identity(int n) {
  std::vector<int> a(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) a[static_cast<size_t>(i)] = i;
  return ClusterMap(std::move(a), n);
}

MarkovMatrix build_M(const ClusterMap& phi) {
  Matrix M = Matrix::Zero(phi.n(), phi.n_hat());
  for (int i = 0; i < phi.n(); ++i) M(i, phi[i]) = 1.0;
  return MarkovMatrix::validate(M);
}

Vector lift_function(const ClusterMap& phi, const Vector& x_hat) {
  require_size(x_hat.size(), phi.n_hat(), "lift_function");
  Vector x(phi.n());
  for (int i = 0; i < phi.n(); ++i) x(i) = x_hat(phi[i]);
  return x;
}

Vector aggregate(const ClusterMap& phi, const Vector& p) {
  require_size(p.size(), phi.n(), "aggregate");
  Vector out = Vector::Zero(phi.n_hat());
  for (int i = 0; i < phi.n(); ++i) out(phi[i]) += p(i);
  return out;
}

ProbVector coarse_measure(const ClusterMap& phi, const ProbVector& pi) {
  return ProbVector::from(aggregate(phi, pi.entries()));
}

MarkovMatrix build_N(const ClusterMap& phi, const ProbVector& pi) {
  pi.require_positive();
  require_size(pi.size(), phi.n(), "build_N");
  const Vector pi_hat = aggregate(phi, pi.entries());
  Matrix N = Matrix::Zero(phi.n_hat(), phi.n());
  for (int i = 0; i < phi.n(); ++i) {
    N(phi[i], i) = pi(i) / pi_hat(phi[i]);
  }
  return MarkovMatrix::validate(N);
}

Vector reconstruct(const CoarseGrainPair& pair, const Vector& x) {
  require_size(x.size(), pair.n(), "reconstruct");
  Vector out = Vector::Zero(pair.n_hat());
  for (int i = 0; i < pair.n(); ++i) {
    const int k = pair.phi[i];
    out(k) += pair.pi(i) * x(i) / pair.pi_hat(k);
  }
  return out;
}

Vector reconstruct_adjoint(const CoarseGrainPair& pair, const Vector& p_hat) {
  require_size(p_hat.size(), pair.n_hat(), "reconstruct_adjoint");
  Vector out(pair.n());
  for (int i = 0; i < pair.n(); ++i) {
    const int k = pair.phi[i];
    out(i) = pair.pi(i) / pair.pi_hat(k) * p_hat(k);
  }
  return out;
}

MarkovMatrix projection_P(const MarkovMatrix& M, const MarkovMatrix& N) {
  if (M.cols() != N.rows() || M.rows() != N.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "M and N shapes do not match");
  }
  return MarkovMatrix::validate(M.entries() * N.entries());
}

CoarseGrainPair make_coarse_grain_pair(const ClusterMap& phi,
                                       const ProbVector& pi) {
  pi.require_positive();
  require_size(pi.size(), phi.n(), "make_coarse_grain_pair");
  MarkovMatrix M = build_M(phi);
  MarkovMatrix N = build_N(phi, pi);
  MarkovMatrix P = projection_P(M, N);
  ProbVector pi_hat = coarse_measure(phi, pi);
  return CoarseGrainPair{phi, std::move(M), std::move(N), pi, std::move(pi_hat),
                         std::move(P)};
}

double weighted_inner(const Vector& x, const Vector& y, const ProbVector& pi) {
  if (x.size() != y.size() || x.size() != pi.size()) {
    throw Error(ErrorKind::DimensionMismatch, "weighted_inner: length mismatch");
  }
  return (x.array() * y.array() * pi.entries().array()).sum();
}

MarkovMatrix coarse_markov(const MarkovMatrix& K, const CoarseGrainPair& pair,
                           double tol) {
  require_size(K.rows(), pair.n(), "coarse_markov");
  const double residual = invariance_residual(K, pair.pi);
  if (residual > tol) {
    std::ostringstream os;
    os << "||K* pi - pi||_inf = " << residual << " > " << tol;
    throw Error(ErrorKind::InvariantMismatch, os.str());
  }
  const Matrix KM = sum_columns_by_block(pair.phi, K.entries());
  return MarkovMatrix::validate(average_rows_by_block(pair, KM), 1e-11);
}

Generator coarse_generator(const Generator& A, const CoarseGrainPair& pair,
                           double tol) {
  require_size(A.size(), pair.n(), "coarse_generator");
  const double scale = std::max(1.0, A.entries().cwiseAbs().maxCoeff());
  const double residual =
      (A.entries().transpose() * pair.pi.entries()).cwiseAbs().maxCoeff();
  if (residual > tol * scale) {
    std::ostringstream os;
    os << "||A* pi||_inf = " << residual;
    throw Error(ErrorKind::InvariantMismatch, os.str());
  }
  const Matrix AM = sum_columns_by_block(pair.phi, A.entries());
  return Generator::validate(average_rows_by_block(pair, AM), 1e-11);
}

double lumpability_defect(const MarkovMatrix& K, const CoarseGrainPair& pair) {
  const MarkovMatrix K_hat = coarse_markov(K, pair, 1e-9);
  const Matrix KM = sum_columns_by_block(pair.phi, K.entries());
  Matrix MK_hat(pair.n(), pair.n_hat());
  for (int i = 0; i < pair.n(); ++i) {
    MK_hat.row(i) = K_hat.entries().row(pair.phi[i]);
  }
  return (KM - MK_hat).cwiseAbs().rowwise().sum().maxCoeff();
}

Vector projected_step(const MarkovMatrix& K, const CoarseGrainPair& pair,
                      const Vector& p) {
  require_size(p.size(), pair.n(), "projected_step");
  const Matrix Pt = pair.P.entries().transpose();
  return Pt * (K.entries().transpose() * (Pt * p));
}

double IdentityResiduals::max() const {
  return std::max({NM_minus_I, MNM_minus_M, NMN_minus_N, Qpihat_minus_MtQpiM,
                   Ntpihat_minus_pi, pihat_minus_Mtpi, P2_minus_P,
                   P_detailed_balance});
}

IdentityResiduals identity_residuals(const CoarseGrainPair& pair) {
  const Matrix& M = pair.M.entries();
  const Matrix& N = pair.N.entries();
  const Matrix& P = pair.P.entries();
  const Vector& pi = pair.pi.entries();
  const Vector& pi_hat = pair.pi_hat.entries();
  const auto n_hat = pair.n_hat();
  auto err = [](const auto& m) { return m.cwiseAbs().maxCoeff(); };

  IdentityResiduals r;
  r.NM_minus_I = err(N * M - Matrix::Identity(n_hat, n_hat));
  r.MNM_minus_M = err(M * N * M - M);
  r.NMN_minus_N = err(N * M * N - N);
  const Matrix Q_pi_hat = pi_hat.asDiagonal();
  r.Qpihat_minus_MtQpiM =
      err(Q_pi_hat - M.transpose() * pi.asDiagonal() * M);
  r.Ntpihat_minus_pi = err(N.transpose() * pi_hat - pi);
  r.pihat_minus_Mtpi = err(M.transpose() * pi - pi_hat);
  r.P2_minus_P = err(P * P - P);
  const Matrix QP = pi.asDiagonal() * P;
  r.P_detailed_balance = err(QP - QP.transpose());
  return r;
}

Matrix moore_penrose_of_M(const MarkovMatrix& M) {
  const Matrix& m = M.entries();
  const Matrix gram = m.transpose() * m;
  return gram.ldlt().solve(m.transpose());
}

}  // namespace markov_cg
