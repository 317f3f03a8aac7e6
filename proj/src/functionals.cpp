#include "markov_cg/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "markov_cg/tensor_cg.hpp"

namespace markov_cg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kExcludedFloor = 1e-12;

void require_same_size(const Vector& x, const ProbVector& pi, const char* what) {
  if (x.size() != pi.size()) {
    std::ostringstream os;
    os << what << ": vector of length " << x.size() << " against measure of "
       << "length " << pi.size();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

void require_invariant(const MarkovMatrix& K, const ProbVector& pi, double tol) {
  const double r = invariance_residual(K, pi);
  if (r > tol) {
    std::ostringstream os;
    os << "||K* pi - pi||_inf = " << r << " > " << tol;
    throw Error(ErrorKind::InvariantMismatch, os.str());
  }
}

double dirichlet_sum(const Vector& x, const Matrix& K, const Vector& pi) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double d = x(i) - x(j);
      total += pi(i) * K(i, j) * d * d;
    }
  }
  return 0.5 * total;
}

// A ratio to minimize together with the map that puts iterates back on the
// normalization slice. `ratio` returns +inf for excluded or infeasible points.
struct RatioProblem {
  std::function<double(const Vector&)> ratio;
  std::function<Vector(Vector)> project;
};

struct StartResult {
  double value = kInf;
  Vector x;
  int iterations = 0;
};

Vector numerical_gradient(const RatioProblem& problem, const Vector& x,
                          double h) {
  Vector g = Vector::Zero(x.size());
  Vector probe = x;
  const double f0 = problem.ratio(x);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double fp = problem.ratio(probe);
    probe(i) = x(i) - h;
    const double fm = problem.ratio(probe);
    probe(i) = x(i);
    if (std::isfinite(fp) && std::isfinite(fm)) {
      g(i) = (fp - fm) / (2.0 * h);
    } else if (std::isfinite(fp)) {
      g(i) = (fp - f0) / h;
    } else if (std::isfinite(fm)) {
      g(i) = (f0 - fm) / h;
    }
  }
  return g;
}

// Projected gradient descent with backtracking.
StartResult descend(const RatioProblem& problem, Vector x,
                    const MinimizerOptions& opts) {
  StartResult r;
  x = problem.project(std::move(x));
  double f = problem.ratio(x);
  if (!std::isfinite(f)) return r;
  double step = 1.0;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const Vector g = numerical_gradient(problem, x, opts.fd_step);
    const double gnorm = g.norm();
    if (!(gnorm > 0.0) || !std::isfinite(gnorm)) break;
    bool improved = false;
    double f_new = f;
    Vector x_new;
    for (int shrink = 0; shrink < 60; ++shrink) {
      x_new = problem.project(x - (step / gnorm) * g);
      f_new = problem.ratio(x_new);
      if (std::isfinite(f_new) && f_new < f) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
    const double gain = f - f_new;
    x = std::move(x_new);
    f = f_new;
    step = std::min(2.0 * step, 1.0);
    if (gain <= opts.rel_tol * std::max(std::abs(f), 1e-300)) break;
  }
  r.value = f;
  r.x = std::move(x);
  r.iterations = it;
  return r;
}

SpectralEstimate minimize_ratio(const RatioProblem& problem,
                                const std::vector<Vector>& starts,
                                const MinimizerOptions& opts) {
  std::vector<std::future<StartResult>> jobs;
  jobs.reserve(starts.size());
  for (const Vector& x0 : starts) {
    jobs.push_back(std::async(std::launch::async,
                              [&problem, &opts, x0] {
                                return descend(problem, x0, opts);
                              }));
  }
  SpectralEstimate best;
  best.value = kInf;
  best.method = "minimize";
  for (size_t s = 0; s < jobs.size(); ++s) {
    StartResult r = jobs[s].get();
    best.iterations += r.iterations;
    // Strict comparison keeps the lowest start index on ties.
    if (r.value < best.value) {
      best.value = r.value;
      best.certificate = std::move(r.x);
      best.best_start = static_cast<int>(s);
    }
  }
  if (!std::isfinite(best.value)) {
    throw Error(ErrorKind::MinimizerDiverged,
                "no start reached a finite ratio");
  }
  return best;
}

std::vector<Vector> make_starts(const MinimizerOptions& opts,
                                const Vector& eigen_direction, bool positive,
                                Eigen::Index n) {
  std::vector<Vector> starts = opts.seeds;
  if (eigen_direction.size() == n) {
    const double scale = eigen_direction.cwiseAbs().maxCoeff();
    if (scale > 0.0) {
      for (double s : {0.5, 0.05}) {
        starts.push_back(Vector::Ones(n) + (s / scale) * eigen_direction);
      }
    }
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(-0.9, 0.9);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int s = 0; s < opts.starts; ++s) {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x(i) = positive ? 1.0 + uni(rng) : gauss(rng);
    }
    starts.push_back(std::move(x));
  }
  return starts;
}

}  // namespace

ConvexProfile::ConvexProfile(std::string name, std::function<double(double)> fn,
                             double domain_min)
    : name_(std::move(name)), fn_(std::move(fn)), domain_min_(domain_min) {}

ConvexProfile ConvexProfile::quadratic() {
  return ConvexProfile("quadratic", [](double r) { return 0.5 * r * r; });
}

ConvexProfile ConvexProfile::boltzmann() {
  return ConvexProfile(
      "boltzmann",
      [](double r) { return r == 0.0 ? 1.0 : r * std::log(r) - r + 1.0; }, 0.0);
}

ConvexProfile ConvexProfile::square() {
  return ConvexProfile("square", [](double r) { return r * r; });
}

ConvexProfile ConvexProfile::quartic() {
  return ConvexProfile("quartic", [](double r) { return r * r * r * r; });
}

ConvexProfile ConvexProfile::smoothed_power(double p, double delta) {
  std::ostringstream name;
  name << "smoothed_power(" << p << ")";
  const double offset = std::pow(delta, p);
  return ConvexProfile(name.str(), [p, delta, offset](double r) {
    return std::pow(r * r + delta * delta, 0.5 * p) - offset;
  });
}

ConvexProfile ConvexProfile::by_name(const std::string& name) {
  if (name == "quadratic") return quadratic();
  if (name == "boltzmann") return boltzmann();
  if (name == "square") return square();
  if (name == "quartic") return quartic();
  if (name == "smoothed_power_1.5") return smoothed_power(1.5);
  throw Error(ErrorKind::InvalidInput, "unknown profile '" + name + "'");
}

double ConvexProfile::operator()(double r) const {
  if (!in_domain(r)) {
    std::ostringstream os;
    os << name_ << " evaluated at " << r << " below domain bound "
       << domain_min_;
    throw Error(ErrorKind::DomainViolation, os.str());
  }
  return fn_(r);
}

bool ConvexProfile::certify(double lo, double hi, int samples) const {
  lo = std::max(lo, domain_min_);
  // Square grid of about `samples` pairs.
  const int side = std::max(2, static_cast<int>(std::sqrt(samples)));
  const double h = (hi - lo) / (side - 1);
  for (int a = 0; a < side; ++a) {
    const double r = lo + a * h;
    if (fn_(r) < 0.0) return false;
    for (int b = a + 1; b < side; ++b) {
      const double s = lo + b * h;
      const double chord = 0.5 * (fn_(r) + fn_(s));
      const double mid = fn_(0.5 * (r + s));
      const double delta = 1e-12 * std::max(1.0, std::abs(chord));
      if (!(mid < chord - delta)) return false;
    }
  }
  return true;
}

double expectation(const Vector& x, const ProbVector& pi) {
  require_same_size(x, pi, "expectation");
  return x.dot(pi.entries());
}

double energy(const Vector& x, const ProbVector& pi, const ConvexProfile& phi) {
  require_same_size(x, pi, "energy");
  double mean_phi = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) mean_phi += pi(i) * phi(x(i));
  return mean_phi - phi(expectation(x, pi));
}

double entropy(const Vector& x, const ProbVector& pi) {
  return energy(x, pi, ConvexProfile::boltzmann());
}

double dirichlet(const Vector& x, const MarkovMatrix& K, const ProbVector& pi,
                 double tol) {
  require_same_size(x, pi, "dirichlet");
  require_invariant(K, pi, tol);
  return dirichlet_sum(x, K.entries(), pi.entries());
}

double dirichlet_tensor(const Vector& x, const MarkovMatrix& K,
                        const ProbVector& pi) {
  require_same_size(x, pi, "dirichlet_tensor");
  const IncidenceOperator D(x.size());
  const EdgeTensor Dx = D.apply(x);
  const EdgeTensor m{pi.entries().asDiagonal() * K.entries(), TensorRole::Dual};
  const EdgeTensor QmDx{m.entries.cwiseProduct(Dx.entries), TensorRole::Dual};
  return 0.5 * tensor_pairing(Dx, QmDx);
}

double dirichlet_generator(const Vector& x, const Generator& A,
                           const ProbVector& pi) {
  require_same_size(x, pi, "dirichlet_generator");
  return -(x.array() * (A.entries() * x).array() * pi.entries().array()).sum();
}

DirichletPullback coarse_dirichlet_pullback(const Vector& x_hat,
                                            const MarkovMatrix& K,
                                            const CoarseGrainPair& pair,
                                            double tol) {
  const MarkovMatrix K_hat = coarse_markov(K, pair);
  DirichletPullback out;
  out.fine = dirichlet(lift_function(pair.phi, x_hat), K, pair.pi);
  out.coarse = dirichlet(x_hat, K_hat, pair.pi_hat);
  out.residual = std::abs(out.fine - out.coarse);
  if (out.residual > tol * std::max(1.0, std::abs(out.fine))) {
    std::ostringstream os;
    os << "D_K(M x_hat) = " << out.fine << " but D_K_hat(x_hat) = "
       << out.coarse;
    throw Error(ErrorKind::IdentityViolation, os.str());
  }
  return out;
}

SpectralEstimate spectral_gap(const MarkovMatrix& K, const ProbVector& pi,
                              double tol) {
  require_invariant(K, pi, 1e-10);
  pi.require_positive();
  const Eigen::Index n = K.rows();
  SpectralEstimate out;
  out.method = "eigen";
  if (n == 1) {
    // No non-constant functions: the infimum is over the empty set.
    out.value = kInf;
    return out;
  }
  const Matrix A = K.entries() - Matrix::Identity(n, n);
  const Matrix QA = pi.entries().asDiagonal() * A;
  const Matrix L = -0.5 * (QA + QA.transpose());
  const Vector inv_sqrt = pi.entries().cwiseSqrt().cwiseInverse();
  const Matrix S = inv_sqrt.asDiagonal() * L * inv_sqrt.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
  out.value = eig.eigenvalues()(1);
  if (out.value < tol) {
    std::ostringstream os;
    os << "spectral gap " << out.value << " below " << tol;
    throw Error(ErrorKind::Reducible, os.str());
  }
  out.certificate = inv_sqrt.asDiagonal() * eig.eigenvectors().col(1);
  out.best_start = 0;
  return out;
}

SpectralEstimate poincare_constant(const MarkovMatrix& K, const ProbVector& pi,
                                   const ConvexProfile& phi,
                                   const MinimizerOptions& opts) {
  const SpectralEstimate gap = spectral_gap(K, pi, opts.spectral_tol);
  if (phi.name() == "quadratic" || K.rows() == 1) return gap;

  const Matrix& Km = K.entries();
  const Vector& w = pi.entries();
  const bool bounded = std::isfinite(phi.domain_min());
  RatioProblem problem;
  problem.ratio = [&](const Vector& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (!phi.in_domain(x(i))) return kInf;
    }
    const double e = energy(x, pi, phi);
    if (!(e >= kExcludedFloor * x.squaredNorm())) return kInf;
    return dirichlet_sum(x, Km, w) / e;
  };
  problem.project = [&](Vector x) {
    if (bounded) {
      x = x.cwiseMax(phi.domain_min());
      const double mean = x.dot(w);
      if (mean > 0.0) x /= mean;
    } else {
      x.array() += 1.0 - x.dot(w);
    }
    return x;
  };
  return minimize_ratio(problem,
                        make_starts(opts, gap.certificate, bounded, K.rows()),
                        opts);
}

SpectralEstimate log_sobolev_constant(const MarkovMatrix& K,
                                      const ProbVector& pi,
                                      const ConvexProfile& g,
                                      const MinimizerOptions& opts) {
  const SpectralEstimate gap = spectral_gap(K, pi, opts.spectral_tol);
  if (K.rows() == 1) return gap;

  const Matrix& Km = K.entries();
  const Vector& w = pi.entries();
  const ConvexProfile boltzmann = ConvexProfile::boltzmann();
  RatioProblem problem;
  problem.ratio = [&](const Vector& x) {
    Vector gx(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (!g.in_domain(x(i))) return kInf;
      gx(i) = g(x(i));
      if (gx(i) < 0.0) return kInf;
    }
    const double ent = energy(gx, pi, boltzmann);
    if (!(ent >= kExcludedFloor * x.squaredNorm())) return kInf;
    return dirichlet_sum(x, Km, w) / ent;
  };
  problem.project = [&](Vector x) {
    if (std::isfinite(g.domain_min())) x = x.cwiseMax(g.domain_min());
    const double norm = std::sqrt(x.cwiseAbs2().dot(w));
    if (norm > 0.0) x /= norm;
    return x;
  };
  SpectralEstimate out = minimize_ratio(
      problem, make_starts(opts, gap.certificate, false, K.rows()), opts);
  return out;
}

SpectralReport compare_under_coarse_graining(const MarkovMatrix& K,
                                             const CoarseGrainPair& pair,
                                             FunctionalKind kind,
                                             const ConvexProfile& profile,
                                             const MinimizerOptions& opts) {
  const MarkovMatrix K_hat = coarse_markov(K, pair);
  auto estimate = [&](const MarkovMatrix& chain, const ProbVector& measure,
                      const MinimizerOptions& o) {
    return kind == FunctionalKind::Poincare
               ? poincare_constant(chain, measure, profile, o)
               : log_sobolev_constant(chain, measure, profile, o);
  };
  SpectralReport report;
  report.kind = kind;
  report.profile = profile.name();
  report.coarse = estimate(K_hat, pair.pi_hat, opts);
  MinimizerOptions fine_opts = opts;
  if (report.coarse.certificate.size() == pair.n_hat()) {
    fine_opts.seeds.insert(fine_opts.seeds.begin(),
                           lift_function(pair.phi, report.coarse.certificate));
  }
  report.fine = estimate(K, pair.pi, fine_opts);
  report.monotone = report.fine.value <= report.coarse.value + 1e-9;
  return report;
}

Generator counterexample_generator(double a) {
  if (!(a >= 0.0)) {
    throw Error(ErrorKind::InvalidInput, "counterexample parameter must be >= 0");
  }
  Matrix A(3, 3);
  A << -8, 4, 4,
        1, -2, 1,
        a, a, -2 * a;
  return Generator::validate(A);
}

MarkovMatrix counterexample_chain(double a, double tau) {
  const Generator A = counterexample_generator(a);
  if (!(tau > 0.0) || tau * std::max(8.0, 2.0 * a) > 1.0) {
    throw Error(ErrorKind::InvalidInput,
                "tau * max|A_ii| must lie in (0, 1] for I + tau A to be Markov");
  }
  return validate_markov(Matrix::Identity(3, 3) + tau * A.entries());
}

CounterexampleRow counterexample_row(double a) {
  CounterexampleRow row;
  row.a = a;
  row.dk_closed = 24.0 * a / (5.0 * a + 4.0);
  row.dk_hat_closed = 8.0 * a * (1.0 + 2.0 * a) * (1.0 + 2.0 * a) /
                      ((a + 1.0) * (a + 1.0) * (5.0 * a + 4.0));
  const Generator A = counterexample_generator(a);
  if (a == 0.0) return row;

  const ProbVector pi = invariant_measure(A);
  const CoarseGrainPair pair =
      make_coarse_grain_pair(ClusterMap::make({0, 1, 1}), pi);
  const Generator A_hat = coarse_generator(A, pair);
  const Vector x = (Vector(3) << 3.0, 1.0, 2.0).finished();
  row.dk = dirichlet_generator(x, A, pi);
  row.dk_hat = dirichlet_generator(reconstruct(pair, x), A_hat, pair.pi_hat);
  return row;
}

double counterexample_crossover(double lo, double hi, double tol) {
  auto gap = [](double a) {
    const CounterexampleRow r = counterexample_row(a);
    return r.dk - r.dk_hat;
  };
  double f_lo = gap(lo);
  const double f_hi = gap(hi);
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    throw Error(ErrorKind::InvalidInput,
                "crossover bracket must have D_K > D_K_hat at lo and < at hi");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = gap(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace markov_cg
