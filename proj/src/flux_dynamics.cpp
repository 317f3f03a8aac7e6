#include "markov_cg/flux_dynamics.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace markov_cg {

namespace {

constexpr double kFredholmHard = 1e-8;
constexpr double kSolverHard = 1e-8;
constexpr double kNumeratorFloor = 1e-12;

void require_reversible(const MarkovMatrix& K, const ProbVector& pi,
                        double tol) {
  if (!K.is_square() || K.rows() != pi.size()) {
    throw Error(ErrorKind::DimensionMismatch, "chain/measure size mismatch");
  }
  pi.require_positive();
  const double r = detailed_balance_residual(K.entries(), pi.entries());
  if (r > tol) {
    std::ostringstream os;
    os << "max |pi_i K_ij - pi_j K_ji| = " << r << " > " << tol;
    throw Error(ErrorKind::NotReversible, os.str());
  }
}

EdgeTensor flux_unchecked(const Vector& c, const MarkovMatrix& K,
                          const ProbVector& pi) {
  if (c.size() != pi.size()) {
    throw Error(ErrorKind::DimensionMismatch, "state/measure size mismatch");
  }
  const Vector rho = c.cwiseQuotient(pi.entries());
  const Matrix m = pi.entries().asDiagonal() * K.entries();
  Matrix b = 0.5 * m.cwiseProduct(incidence_apply(rho).entries);
  return EdgeTensor{std::move(b), TensorRole::Dual};
}

EdgeTensor unflatten(const Vector& y, Eigen::Index n) {
  Matrix b(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = y(i * n + j);
  }
  return EdgeTensor{std::move(b), TensorRole::Dual};
}

}  // namespace

Vector gradient_flow_rhs(const Vector& c, const MarkovMatrix& K,
                         const ProbVector& pi, double tol) {
  return -incidence_adjoint(flux_of(c, K, pi, tol));
}

EdgeTensor flux_of(const Vector& c, const MarkovMatrix& K, const ProbVector& pi,
                   double tol) {
  require_reversible(K, pi, tol);
  return flux_unchecked(c, K, pi);
}

CoarseStep coarse_evolution_step(const Vector& c_hat, const MarkovMatrix& K_hat,
                                 const ProbVector& pi_hat, double tol) {
  EdgeTensor b_hat = flux_of(c_hat, K_hat, pi_hat, tol);
  Vector c_hat_dot = -incidence_adjoint(b_hat);
  return CoarseStep{std::move(c_hat_dot), std::move(b_hat)};
}

FluxReconstruction reconstruct_flux(const EdgeTensor& b_hat,
                                    const CoarseGrainPair& pair,
                                    const EdgeTensor& m) {
  const ClusterMap& phi = pair.phi;
  const EdgeTensor m_hat = restrict(phi, m);
  const EdgeReconstruction n_tilde = edge_reconstruct_op(m, m_hat, phi);
  for (int l = 0; l < phi.n_hat(); ++l) {
    for (int k = 0; k < phi.n_hat(); ++k) {
      if (k != l && m_hat.entries(k, l) <= 0.0 &&
          std::abs(b_hat.entries(k, l)) > kNumeratorFloor) {
        std::ostringstream os;
        os << "coarse flux " << b_hat.entries(k, l) << " on block pair (" << k
           << "," << l << ") with zero weight";
        throw Error(ErrorKind::WeightDegenerate, os.str());
      }
    }
  }
  const IncidenceOperator D(phi.n());
  const IncidenceOperator D_hat(phi.n_hat());

  FluxReconstruction out;
  out.b1 = n_tilde.adjoint(b_hat);
  out.b1.role = TensorRole::Dual;
  out.x_star =
      reconstruct_adjoint(pair, D_hat.adjoint(b_hat)) - D.adjoint(out.b1);
  out.fredholm = out.x_star.sum();
  if (std::abs(out.fredholm) > kFredholmHard) {
    std::ostringstream os;
    os << "<1, x*> = " << out.fredholm << " (x* must be orthogonal to Ker D)";
    throw Error(ErrorKind::FredholmViolation, os.str());
  }

  const Matrix D_star = D.dense().transpose();
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(D_star);
  const Vector y = cod.solve(out.x_star);
  out.residual = (D_star * y - out.x_star).cwiseAbs().maxCoeff();
  if (!(out.residual <= kSolverHard)) {
    std::ostringstream os;
    os << "least-squares residual " << out.residual;
    throw Error(ErrorKind::SolverFailure, os.str());
  }
  out.b2 = unflatten(y, phi.n());
  out.kernel_residual =
      D_hat.adjoint(restrict(phi, out.b2)).cwiseAbs().maxCoeff();
  return out;
}

std::vector<ContinuityState> evolve(const ProbVector& c0, const MarkovMatrix& K,
                                    const ProbVector& pi, double t_end,
                                    double dt, Integrator scheme) {
  require_reversible(K, pi, 1e-10);
  if (c0.size() != pi.size()) {
    throw Error(ErrorKind::DimensionMismatch, "initial state size mismatch");
  }
  if (!(dt > 0.0) || !(t_end >= 0.0)) {
    throw Error(ErrorKind::InvalidInput, "need dt > 0 and t_end >= 0");
  }
  const Eigen::Index n = K.rows();
  const Matrix At = K.entries().transpose() - Matrix::Identity(n, n);
  const double max_rate = At.diagonal().cwiseAbs().maxCoeff();
  if (scheme == Integrator::ExplicitEuler && max_rate * dt > 1.0) {
    std::ostringstream os;
    os << "dt = " << dt << " exceeds 1/max|A_ii| = " << 1.0 / max_rate;
    throw Error(ErrorKind::StepTooLarge, os.str());
  }

  auto record = [&](double t, const Vector& c) {
    return ContinuityState{t, c, c.cwiseQuotient(pi.entries()),
                           flux_unchecked(c, K, pi)};
  };

  std::vector<ContinuityState> out;
  Vector c = c0.entries();
  out.push_back(record(0.0, c));
  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  const Matrix full_step =
      scheme == Integrator::Exponential ? Matrix((At * dt).exp()) : Matrix();
  double t = 0.0;
  for (long k = 1; k <= steps; ++k) {
    const double t_next = std::min(static_cast<double>(k) * dt, t_end);
    const double h = t_next - t;
    if (scheme == Integrator::ExplicitEuler) {
      c += h * (At * c);
    } else if (k < steps || h == dt) {
      c = full_step * c;
    } else {
      c = (At * h).exp() * c;
    }
    t = t_next;
    out.push_back(record(t, c));
  }
  return out;
}

}  // namespace markov_cg
