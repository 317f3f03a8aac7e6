#include <iostream>

#include <CLI11.hpp>

#include "markov_cg/commands.hpp"

using markov_cg::Command;
using markov_cg::RunConfig;

namespace {

void add_inputs(CLI::App* sub, RunConfig& config) {
  sub->add_option("--chain", config.chain_path, "chain JSON file")->required();
  sub->add_option("--partition", config.partition_path, "partition JSON file")
      ->required();
  sub->add_option("--tol", config.tol.structural,
                  "tolerance for row sums, invariance and detailed balance");
  sub->add_option("--seed", config.seed, "RNG seed");
  sub->add_option("--out", config.out_path, "write the JSON report here");
}

}  // namespace

int main(int argc, char** argv) {
  markov_cg::configure_logging();

  CLI::App app{"Coarse-graining and reconstruction of finite Markov chains"};
  app.require_subcommand(1);
  RunConfig config;

  auto* reduce = app.add_subcommand("reduce", "coarse-grain a chain");
  add_inputs(reduce, config);

  auto* flux = app.add_subcommand("flux", "evolve the coarse chain and "
                                          "reconstruct fine fluxes");
  add_inputs(flux, config);
  flux->add_option("--t-end", config.t_end, "final time");
  flux->add_option("--dt", config.dt, "time step");
  flux->add_option("--initial", config.initial, "point | stationary | random")
      ->check(CLI::IsMember({"point", "stationary", "random"}));
  flux->add_option("--trajectory", config.trajectory_path,
                   "JSON-lines trajectory export");

  auto* spectral = app.add_subcommand(
      "spectral", "Poincare or log-Sobolev constants of K and K_hat");
  add_inputs(spectral, config);
  spectral->add_option("--profile", config.profile,
                       "quadratic | boltzmann | square | quartic | "
                       "smoothed_power_1.5 | log-sobolev");

  auto* counter = app.add_subcommand(
      "counterexample", "Dirichlet form of a four-state family under "
                        "coarse-graining");
  counter->add_option("--a-min", config.a_min);
  counter->add_option("--a-max", config.a_max);
  counter->add_option("--steps", config.steps, "rows in the table");
  counter->add_option("--out", config.out_path, "write the JSON report here");
  counter->add_flag("--selftest", config.selftest,
                    "exit 1 unless a* matches 1 + sqrt 3");

  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
  selftest->add_option("--seed", config.seed, "RNG seed");
  selftest->add_option("--out", config.out_path, "write the JSON results here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Command command = Command::Selftest;
  if (*reduce) command = Command::Reduce;
  else if (*flux) command = Command::Flux;
  else if (*spectral) command = Command::Spectral;
  else if (*counter) command = Command::Counterexample;
  return markov_cg::run_command(command, config, std::cout, std::cerr);
}
