#pragma once

// Subcommands of the `markov-cg` tool. Each `*_report` function does the work
// and throws on failure; `run_command` wraps one of them, writes the JSON
// report and a short summary, and maps failures to exit codes:
//   0 success, 1 domain/validation failure, 2 usage or I/O failure.

#include <cstdint>
#include <ostream>
#include <string>

#include "markov_cg/io.hpp"

namespace markov_cg {

struct RunConfig {
  std::string chain_path;
  std::string partition_path;
  std::string out_path;         // empty: JSON goes to the summary stream
  std::string trajectory_path;  // flux: optional JSON-lines export
  Tolerances tol;
  std::uint64_t seed = 42;
  std::string profile = "quadratic";
  std::string initial = "point";  // flux: point | stationary | random
  double t_end = 1.0;
  double dt = 0.1;
  double a_min = 0.0;
  double a_max = 5.0;
  int steps = 11;
  bool selftest = false;

  /// Throws Usage if a tolerance or step parameter is out of range.
  void validate() const;
};

Json reduce_report(const RunConfig& config);
Json flux_report(const RunConfig& config);
Json spectral_report(const RunConfig& config);
Json counterexample_report(const RunConfig& config);

int exit_code_for(ErrorKind kind);

enum class Command { Reduce, Flux, Spectral, Counterexample, Selftest };

/// Runs `command`, prints a human-readable summary to `out` and errors to
/// `err`, and returns the exit code.
int run_command(Command command, const RunConfig& config, std::ostream& out,
                std::ostream& err);

/// Sets the spdlog level from MARKOV_CG_LOG (error|warn|info|debug).
void configure_logging();

}  // namespace markov_cg
