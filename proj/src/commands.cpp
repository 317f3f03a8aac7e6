#include "markov_cg/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "markov_cg/acceptance.hpp"
#include "markov_cg/flux_dynamics.hpp"
#include "markov_cg/random.hpp"

namespace markov_cg {

namespace {

struct LoadedChain {
  MarkovMatrix K;
  ProbVector pi;
};

LoadedChain load_chain(const RunConfig& config) {
  if (config.chain_path.empty()) {
    throw Error(ErrorKind::Usage, "--chain is required");
  }
  ChainFile file = read_chain_file(config.chain_path, config.tol.structural);
  if (file.pi) {
    spdlog::info("chain {}: n = {}, pi from file", config.chain_path,
                 file.K.rows());
    return {std::move(file.K), std::move(*file.pi)};
  }
  ProbVector pi =
      invariant_measure(file.K, config.tol.spectral, config.tol.positivity);
  spdlog::info("chain {}: n = {}, pi computed", config.chain_path,
               file.K.rows());
  return {std::move(file.K), std::move(pi)};
}

ClusterMap load_partition(const RunConfig& config, Eigen::Index n) {
  if (config.partition_path.empty()) {
    throw Error(ErrorKind::Usage, "--partition is required");
  }
  ClusterMap phi = read_partition_file(config.partition_path);
  if (phi.n() != n) {
    throw Error(ErrorKind::DimensionMismatch,
                "partition has " + std::to_string(phi.n()) +
                    " states but the chain has " + std::to_string(n));
  }
  return phi;
}

Json tolerances_json(const Tolerances& t) {
  return Json{{"structural", t.structural},
              {"spectral", t.spectral},
              {"solver", t.solver},
              {"positivity", t.positivity}};
}

Json input_json(const std::string& path) {
  return Json{{"path", path}, {"sha256", file_digest(path)}};
}

Json header(const char* command, const RunConfig& config, bool with_chain,
            bool with_partition) {
  Json inputs = Json::object();
  if (with_chain) inputs["chain"] = input_json(config.chain_path);
  if (with_partition) inputs["partition"] = input_json(config.partition_path);
  return Json{{"command", command},
              {"tolerances", tolerances_json(config.tol)},
              {"seed", config.seed},
              {"inputs", std::move(inputs)}};
}

Json residuals_json(const IdentityResiduals& r) {
  return Json{{"NM_minus_I", r.NM_minus_I},
              {"MNM_minus_M", r.MNM_minus_M},
              {"NMN_minus_N", r.NMN_minus_N},
              {"Q_pihat_minus_MtQ_piM", r.Qpihat_minus_MtQpiM},
              {"Nt_pihat_minus_pi", r.Ntpihat_minus_pi},
              {"pihat_minus_Mt_pi", r.pihat_minus_Mtpi},
              {"P2_minus_P", r.P2_minus_P},
              {"P_detailed_balance", r.P_detailed_balance}};
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void summarize_reduce(const Json& r, std::ostream& out) {
  out << "reduced " << r["n"] << " states to " << r["n_hat"] << " clusters\n"
      << "  lumpability defect  " << r["lumpability_defect"] << '\n'
      << "  max identity resid  " << r["max_identity_residual"] << '\n';
}

void summarize_flux(const Json& r, std::ostream& out) {
  const Json& s = r["summary"];
  out << "flux reconstruction over " << s["steps"] << " coarse steps\n"
      << "  equilibration resid " << s["max_equilibration_residual"] << '\n'
      << "  restriction resid   " << s["max_restriction_residual"] << '\n'
      << "  |<1, x*>|           " << s["max_fredholm"] << '\n'
      << "  LS residual         " << s["max_solver_residual"] << '\n'
      << "  kernel condition    " << s["max_kernel_residual"] << '\n'
      << "  continuity resid    " << s["max_continuity_residual"] << '\n';
}

void summarize_spectral(const Json& r, std::ostream& out) {
  out << r["kind"].get<std::string>() << " (" << r["profile"].get<std::string>()
      << "): lambda = " << r["lambda"] << ", lambda_hat = " << r["lambda_hat"]
      << ", monotone: " << (r["monotone"].get<bool>() ? "true" : "false")
      << '\n';
}

void summarize_counterexample(const Json& r, std::ostream& out) {
  out << std::setw(10) << "a" << std::setw(16) << "D_K" << std::setw(16)
      << "D_K_hat" << std::setw(6) << "sign" << '\n';
  for (const Json& row : r["rows"]) {
    const int sign = row["sign"].get<int>();
    out << std::setw(10) << row["a"].get<double>() << std::setw(16)
        << row["DK"].get<double>() << std::setw(16)
        << row["DK_hat"].get<double>() << std::setw(6)
        << (sign > 0 ? "+" : sign < 0 ? "-" : "0") << '\n';
  }
  if (r["a_star"].is_null()) {
    out << "no crossover in range\n";
  } else {
    out << "crossover a* = " << std::setprecision(12)
        << r["a_star"].get<double>() << " (1 + sqrt 3 = "
        << 1.0 + std::sqrt(3.0) << ")\n";
  }
}

ProbVector initial_coarse_state(const RunConfig& config,
                                const ProbVector& pi_hat) {
  if (config.initial == "stationary") return pi_hat;
  if (config.initial == "point") {
    return ProbVector::from(Vector::Unit(pi_hat.size(), 0));
  }
  if (config.initial == "random") {
    Sampler s(config.seed);
    return s.positive_measure(pi_hat.size(), 0.0);
  }
  throw Error(ErrorKind::Usage, "unknown --initial '" + config.initial + "'");
}

}  // namespace

void RunConfig::validate() const {
  if (!(tol.structural > 0 && tol.spectral > 0 && tol.solver > 0 &&
        tol.positivity > 0)) {
    throw Error(ErrorKind::Usage, "tolerances must be positive");
  }
  if (!(dt > 0)) throw Error(ErrorKind::Usage, "--dt must be positive");
  if (!(t_end >= 0)) throw Error(ErrorKind::Usage, "--t-end must be >= 0");
}

Json reduce_report(const RunConfig& config) {
  config.validate();
  const LoadedChain chain = load_chain(config);
  const ClusterMap phi = load_partition(config, chain.K.rows());
  const CoarseGrainPair pair = make_coarse_grain_pair(phi, chain.pi);
  const MarkovMatrix K_hat = coarse_markov(chain.K, pair, config.tol.spectral);
  const Generator A_hat =
      coarse_generator(generator_of(chain.K), pair, config.tol.spectral);
  const IdentityResiduals residuals = identity_residuals(pair);

  Json r = header("reduce", config, true, true);
  r["n"] = pair.n();
  r["n_hat"] = pair.n_hat();
  r["assignment"] = phi.assignment();
  r["pi"] = vector_to_json(pair.pi.entries());
  r["pi_hat"] = vector_to_json(pair.pi_hat.entries());
  r["N"] = matrix_to_json(pair.N.entries());
  r["K_hat"] = matrix_to_json(K_hat.entries());
  r["A_hat"] = matrix_to_json(A_hat.entries());
  r["lumpability_defect"] = lumpability_defect(chain.K, pair);
  r["reversible"] =
      is_detailed_balance(chain.K, chain.pi, config.tol.structural);
  r["coarse_reversible"] =
      is_detailed_balance(K_hat, pair.pi_hat, config.tol.structural);
  r["residuals"] = residuals_json(residuals);
  r["max_identity_residual"] = residuals.max();
  r["quotient_graph"] = quotient_graph_to_json(quotient_graph(chain.K, phi));
  return r;
}

Json flux_report(const RunConfig& config) {
  config.validate();
  const LoadedChain chain = load_chain(config);
  const ClusterMap phi = load_partition(config, chain.K.rows());
  if (!is_detailed_balance(chain.K, chain.pi, 1e-10)) {
    throw Error(ErrorKind::NotReversible,
                "flux decomposition needs a chain in detailed balance; max "
                "|pi_i K_ij - pi_j K_ji| = " +
                    std::to_string(detailed_balance_residual(
                        chain.K.entries(), chain.pi.entries())));
  }
  const CoarseGrainPair pair = make_coarse_grain_pair(phi, chain.pi);
  const MarkovMatrix K_hat = coarse_markov(chain.K, pair, config.tol.spectral);
  const EdgeTensor m = edge_weight(chain.K, chain.pi, config.tol.spectral);
  const EdgeReconstruction n_tilde =
      edge_reconstruct_op(m, restrict(phi, m), phi);

  const ProbVector c_hat0 = initial_coarse_state(config, pair.pi_hat);
  const auto trajectory =
      evolve(c_hat0, K_hat, pair.pi_hat, config.t_end, config.dt);

  std::ofstream jsonl;
  if (!config.trajectory_path.empty()) {
    jsonl.open(config.trajectory_path, std::ios::trunc);
    if (!jsonl) {
      throw Error(ErrorKind::Io,
                  "cannot write '" + config.trajectory_path + "'");
    }
  }

  double eq = 0, restr = 0, fred = 0, solver = 0, kernel = 0, cont = 0;
  Json steps = Json::array();
  for (const ContinuityState& s : trajectory) {
    const CoarseStep coarse = coarse_evolution_step(s.c, K_hat, pair.pi_hat);
    const Vector c = reconstruct_adjoint(pair, s.c);
    const EdgeTensor fine = flux_of(c, chain.K, chain.pi);
    const EdgeTensor lifted = n_tilde.adjoint(coarse.b_hat);
    const FluxReconstruction rec = reconstruct_flux(coarse.b_hat, pair, m);
    const Vector c_dot = -incidence_adjoint(rec.total());

    const double eq_s = max_abs(fine.entries - lifted.entries);
    eq = std::max(eq, eq_s);
    restr = std::max(restr,
                     max_abs(restrict(phi, fine).entries - coarse.b_hat.entries));
    fred = std::max(fred, std::abs(rec.fredholm));
    solver = std::max(solver, rec.residual);
    kernel = std::max(kernel, rec.kernel_residual);
    cont = std::max(cont, (c_dot - reconstruct_adjoint(pair, coarse.c_hat_dot))
                              .cwiseAbs()
                              .maxCoeff());
    const double b_norm = max_abs(rec.total().entries);
    steps.push_back(Json{{"t", s.t},
                         {"b_hat_norm", max_abs(coarse.b_hat.entries)},
                         {"b_norm", b_norm},
                         {"b2_norm", max_abs(rec.b2.entries)},
                         {"equilibration_residual", eq_s}});
    if (jsonl.is_open()) {
      jsonl << Json{{"t", s.t}, {"c", vector_to_json(c)}, {"b_norm", b_norm}}
                   .dump()
            << '\n';
    }
    spdlog::debug("t = {}: |b_hat| = {}, equilibration {}", s.t,
                  max_abs(coarse.b_hat.entries), eq_s);
  }

  Json r = header("flux", config, true, true);
  r["n"] = pair.n();
  r["n_hat"] = pair.n_hat();
  r["initial"] = config.initial;
  r["t_end"] = config.t_end;
  r["dt"] = config.dt;
  r["trajectory"] = std::move(steps);
  r["summary"] = Json{{"steps", trajectory.size()},
                      {"max_equilibration_residual", eq},
                      {"max_restriction_residual", restr},
                      {"max_fredholm", fred},
                      {"max_solver_residual", solver},
                      {"max_kernel_residual", kernel},
                      {"max_continuity_residual", cont}};
  return r;
}

Json spectral_report(const RunConfig& config) {
  config.validate();
  FunctionalKind kind = FunctionalKind::Poincare;
  std::optional<ConvexProfile> profile;
  if (config.profile == "log-sobolev") {
    kind = FunctionalKind::LogSobolev;
    profile = ConvexProfile::square();
  } else {
    try {
      profile = ConvexProfile::by_name(config.profile);
    } catch (const Error& e) {
      const std::string what = e.what();
      throw Error(ErrorKind::Usage, what.substr(what.find(": ") + 2));
    }
  }
  const LoadedChain chain = load_chain(config);
  const ClusterMap phi = load_partition(config, chain.K.rows());
  const CoarseGrainPair pair = make_coarse_grain_pair(phi, chain.pi);

  MinimizerOptions opts;
  opts.seed = config.seed;
  opts.spectral_tol = config.tol.spectral;
  const SpectralReport report =
      compare_under_coarse_graining(chain.K, pair, kind, *profile, opts);

  Json r = header("spectral", config, true, true);
  r.update(spectral_report_to_json(report));
  r["reversible"] =
      is_detailed_balance(chain.K, chain.pi, config.tol.structural);
  if (report.fine.method == "eigen") {
    // inf D/E for E = 1/2 Var is twice the gap.
    r["energy_ratio"] = Json{{"fine", 2.0 * report.fine.value},
                             {"coarse", 2.0 * report.coarse.value}};
  }
  return r;
}

Json counterexample_report(const RunConfig& config) {
  if (!(config.a_min >= 0.0 && config.a_min < config.a_max)) {
    throw Error(ErrorKind::Usage, "need 0 <= a_min < a_max");
  }
  if (config.steps < 2) throw Error(ErrorKind::Usage, "--steps must be >= 2");

  Json rows = Json::array();
  std::vector<double> as, gaps;
  for (int k = 0; k < config.steps; ++k) {
    const double a = config.a_min + (config.a_max - config.a_min) * k /
                                        static_cast<double>(config.steps - 1);
    const CounterexampleRow row = counterexample_row(a);
    const double gap = row.dk - row.dk_hat;
    const int sign = gap > 1e-12 ? 1 : gap < -1e-12 ? -1 : 0;
    rows.push_back(Json{{"a", a},
                        {"DK", row.dk},
                        {"DK_hat", row.dk_hat},
                        {"DK_closed", row.dk_closed},
                        {"DK_hat_closed", row.dk_hat_closed},
                        {"sign", sign}});
    as.push_back(a);
    gaps.push_back(gap);
  }
  Json a_star = nullptr;
  for (size_t k = 0; k + 1 < as.size(); ++k) {
    if (gaps[k] > 1e-12 && gaps[k + 1] < -1e-12) {
      a_star = counterexample_crossover(as[k], as[k + 1]);
      break;
    }
  }
  Json r{{"command", "counterexample"},
         {"a_min", config.a_min},
         {"a_max", config.a_max},
         {"steps", config.steps},
         {"x", {3, 1, 2}},
         {"rows", std::move(rows)},
         {"a_star", a_star},
         {"a_star_expected", 1.0 + std::sqrt(3.0)}};
  if (config.selftest) {
    r["selftest_passed"] =
        !a_star.is_null() &&
        std::abs(a_star.get<double>() - (1.0 + std::sqrt(3.0))) <= 1e-6;
  }
  return r;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::Usage:
      return 2;
    default:
      return 1;
  }
}

int run_command(Command command, const RunConfig& config, std::ostream& out,
                std::ostream& err) {
  try {
    Json report;
    int code = 0;
    switch (command) {
      case Command::Reduce:
        report = reduce_report(config);
        break;
      case Command::Flux:
        report = flux_report(config);
        break;
      case Command::Spectral:
        report = spectral_report(config);
        break;
      case Command::Counterexample:
        report = counterexample_report(config);
        if (config.selftest && !report["selftest_passed"].get<bool>()) code = 1;
        break;
      case Command::Selftest: {
        const auto results = run_acceptance(config.seed);
        const bool ok = print_acceptance(results, out);
        report = Json{{"command", "selftest"}, {"seed", config.seed}};
        report["criteria"] = Json::array();
        for (const auto& c : results) {
          report["criteria"].push_back(Json{{"id", c.id},
                                            {"name", c.name},
                                            {"passed", c.passed},
                                            {"detail", c.detail}});
        }
        report["passed"] = ok;
        code = ok ? 0 : 1;
        if (!config.out_path.empty()) write_json_file(config.out_path, report);
        return code;
      }
    }
    if (config.out_path.empty()) {
      out << report.dump(2) << '\n';
    } else {
      write_json_file(config.out_path, report);
      switch (command) {
        case Command::Reduce: summarize_reduce(report, out); break;
        case Command::Flux: summarize_flux(report, out); break;
        case Command::Spectral: summarize_spectral(report, out); break;
        case Command::Counterexample:
          summarize_counterexample(report, out);
          break;
        case Command::Selftest: break;
      }
      out << "report written to " << config.out_path << '\n';
    }
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("markov-cg");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("MARKOV_CG_LOG")) {
    const std::string name(level);
    if (name == "error") spdlog::set_level(spdlog::level::err);
    else if (name == "warn") spdlog::set_level(spdlog::level::warn);
    else if (name == "info") spdlog::set_level(spdlog::level::info);
    else if (name == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("ignoring MARKOV_CG_LOG={}", name);
  }
}

}  // namespace markov_cg
