#include "markov_cg/markov_core.hpp"

#include <cmath>
#include <sstream>

namespace markov_cg {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::RowSumViolation: return "RowSumViolation";
    case ErrorKind::NonUniqueInvariant: return "NonUniqueInvariant";
    case ErrorKind::NonPositiveInvariant: return "NonPositiveInvariant";
    case ErrorKind::NotSurjective: return "NotSurjective";
    case ErrorKind::InvariantMismatch: return "InvariantMismatch";
    case ErrorKind::IdentityViolation: return "IdentityViolation";
    case ErrorKind::WeightMismatch: return "WeightMismatch";
    case ErrorKind::WeightDegenerate: return "WeightDegenerate";
    case ErrorKind::NotReversible: return "NotReversible";
    case ErrorKind::FredholmViolation: return "FredholmViolation";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::Reducible: return "Reducible";
    case ErrorKind::MinimizerDiverged: return "MinimizerDiverged";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Usage: return "Usage";
  }
  return "Unknown";
}

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::InvalidInput,
                std::string(what) + " contains non-finite entries");
  }
}

// Normalized null vector of a square matrix whose kernel is expected to be
// one-dimensional and spanned by a positive vector.
ProbVector null_measure(const Matrix& B, double tol, double eps_pos) {
  const Eigen::Index n = B.rows();
  if (n == 1) {
    return ProbVector::positive(Vector::Ones(1));
  }
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  if (sigma(n - 2) < tol) {
    std::ostringstream os;
    os << "kernel dimension > 1 (second smallest singular value "
       << sigma(n - 2) << " < " << tol << ")";
    throw Error(ErrorKind::NonUniqueInvariant, os.str());
  }
  Vector v = svd.matrixV().col(n - 1);
  const double mass = v.sum();
  if (std::abs(mass) < eps_pos) {
    throw Error(ErrorKind::NonPositiveInvariant,
                "null vector has zero total mass");
  }
  v /= mass;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(v(i) > eps_pos)) {
      std::ostringstream os;
      os << "entry " << i << " of the invariant vector is " << v(i);
      throw Error(ErrorKind::NonPositiveInvariant, os.str());
    }
  }
  // Clean up roundoff in the mass before handing out the measure.
  v /= v.sum();
  return ProbVector::positive(std::move(v), 1e-12, eps_pos);
}

}  // namespace

ProbVector ProbVector::from(Vector entries, double tol, double eps_pos) {
  if (entries.size() == 0) {
    throw Error(ErrorKind::InvalidInput, "empty probability vector");
  }
  require_finite(entries, "probability vector");
  bool positive = true;
  for (Eigen::Index i = 0; i < entries.size(); ++i) {
    if (entries(i) < 0.0) {
      std::ostringstream os;
      os << "probability entry " << i << " = " << entries(i);
      throw Error(ErrorKind::NegativeEntry, os.str());
    }
    positive = positive && entries(i) >= eps_pos;
  }
  const double mass = entries.sum();
  if (std::abs(mass - 1.0) > tol) {
    std::ostringstream os;
    os << "probability vector has mass " << mass;
    throw Error(ErrorKind::RowSumViolation, os.str());
  }
  return ProbVector(std::move(entries), positive);
}

ProbVector ProbVector::positive(Vector entries, double tol, double eps_pos) {
  auto p = from(std::move(entries), tol, eps_pos);
  p.require_positive();
  return p;
}

ProbVector ProbVector::uniform(Eigen::Index n) {
  return ProbVector(Vector::Constant(n, 1.0 / static_cast<double>(n)), true);
}

const ProbVector& ProbVector::require_positive() const {
  if (!positive_) {
    throw Error(ErrorKind::NonPositiveInvariant,
                "measure is required to be positive");
  }
  return *this;
}

MarkovMatrix MarkovMatrix::validate(const Matrix& entries, double tol) {
  if (entries.rows() == 0 || entries.cols() == 0) {
    throw Error(ErrorKind::InvalidInput, "empty matrix");
  }
  require_finite(entries, "Markov matrix");
  Matrix K = entries;
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    for (Eigen::Index j = 0; j < K.cols(); ++j) {
      if (K(i, j) < 0.0) {
        std::ostringstream os;
        os << "K(" << i << "," << j << ") = " << K(i, j);
        throw Error(ErrorKind::NegativeEntry, os.str());
      }
    }
    const double sum = K.row(i).sum();
    if (std::abs(sum - 1.0) > tol) {
      std::ostringstream os;
      os << "row " << i << " sums to " << sum;
      throw Error(ErrorKind::RowSumViolation, os.str());
    }
    K.row(i) /= sum;
  }
  return MarkovMatrix(std::move(K));
}

Generator Generator::validate(const Matrix& entries, double tol) {
  if (entries.rows() == 0 || entries.rows() != entries.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "generator must be square");
  }
  require_finite(entries, "generator");
  for (Eigen::Index i = 0; i < entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < entries.cols(); ++j) {
      if (i != j && entries(i, j) < 0.0) {
        std::ostringstream os;
        os << "A(" << i << "," << j << ") = " << entries(i, j);
        throw Error(ErrorKind::NegativeEntry, os.str());
      }
    }
    const double sum = entries.row(i).sum();
    const double scale = std::max(1.0, entries.row(i).cwiseAbs().maxCoeff());
    if (std::abs(sum) > tol * scale) {
      std::ostringstream os;
      os << "generator row " << i << " sums to " << sum;
      throw Error(ErrorKind::RowSumViolation, os.str());
    }
  }
  return Generator(entries);
}

MarkovMatrix validate_markov(const Matrix& K, double tol) {
  if (K.rows() != K.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "transition matrix must be square");
  }
  return MarkovMatrix::validate(K, tol);
}

ProbVector invariant_measure(const MarkovMatrix& K, double tol, double eps_pos) {
  if (!K.is_square()) {
    throw Error(ErrorKind::DimensionMismatch, "transition matrix must be square");
  }
  const Eigen::Index n = K.rows();
  const Matrix B = K.entries().transpose() - Matrix::Identity(n, n);
  ProbVector pi = null_measure(B, tol, eps_pos);
  if (invariance_residual(K, pi) > tol) {
    throw Error(ErrorKind::NonUniqueInvariant,
                "invariant vector failed the residual check");
  }
  return pi;
}

ProbVector invariant_measure(const Generator& A, double tol, double eps_pos) {
  return null_measure(A.entries().transpose(), tol, eps_pos);
}

double detailed_balance_residual(const Matrix& K, const Vector& pi) {
  const Matrix flux = pi.asDiagonal() * K;
  return (flux - flux.transpose()).cwiseAbs().maxCoeff();
}

bool is_detailed_balance(const MarkovMatrix& K, const ProbVector& pi,
                         double tol) {
  if (K.rows() != pi.size() || !K.is_square()) return false;
  return detailed_balance_residual(K.entries(), pi.entries()) <= tol;
}

bool is_detailed_balance(const Generator& A, const ProbVector& pi, double tol) {
  if (A.size() != pi.size()) return false;
  return detailed_balance_residual(A.entries(), pi.entries()) <= tol;
}

double invariance_residual(const MarkovMatrix& K, const ProbVector& pi) {
  if (K.rows() != pi.size()) {
    throw Error(ErrorKind::DimensionMismatch, "measure/matrix size mismatch");
  }
  return (K.entries().transpose() * pi.entries() - pi.entries())
      .cwiseAbs()
      .maxCoeff();
}

Generator generator_of(const MarkovMatrix& K) {
  if (!K.is_square()) {
    throw Error(ErrorKind::DimensionMismatch, "transition matrix must be square");
  }
  const Eigen::Index n = K.rows();
  return Generator::validate(K.entries() - Matrix::Identity(n, n), 1e-12);
}

ProbVector chain_step(const MarkovMatrix& K, const ProbVector& p) {
  if (K.rows() != p.size()) {
    throw Error(ErrorKind::DimensionMismatch, "state/matrix size mismatch");
  }
  Vector next = K.entries().transpose() * p.entries();
  return ProbVector::from(std::move(next), 1e-12);
}

DensityVector relative_density(const ProbVector& p, const ProbVector& pi) {
  pi.require_positive();
  if (p.size() != pi.size()) {
    throw Error(ErrorKind::DimensionMismatch, "measure size mismatch");
  }
  return DensityVector{p.entries().cwiseQuotient(pi.entries())};
}

}  // namespace markov_cg
