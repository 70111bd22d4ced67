#ifndef DOPT_HARNESS_HPP
#define DOPT_HARNESS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dopt/cexchange.hpp"
#include "dopt/metrics.hpp"
#include "dopt/schedule.hpp"
#include "dopt/solve_report.hpp"

namespace dopt {

// Raised for malformed or incompatible configurations (maps to exit code 2
// in the CLI, as opposed to solver failures which map to 3).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// One experiment: a problem instance, a communication graph, and a single
// algorithm with its parameters. Parsed from versioned JSON; unknown keys
// are rejected so old configs cannot silently change meaning.
struct RunConfig {
  int schema_version = 1;
  std::string name;  // output file stem

  std::string problem_generator;  // logistic | lasso | qp | microgrid | svm | random-lp
  std::uint64_t problem_seed = 0;
  nlohmann::json problem_params;  // generator-specific numeric parameters

  std::string graph_generator = "erdos-renyi";
  std::uint64_t graph_seed = 0;
  nlohmann::json graph_params;  // p, directed

  // dsg | gt | ddec | dadmm | dual-subgradient | rsdd | cc-lp | cc-convex
  std::string algorithm;
  long rounds = 1000;
  StepSchedule schedule = StepSchedule::constant(1e-3);
  double rho = 0.1;  // dadmm
  double M = 0.0;    // rsdd penalty (<= 0 derives 10 ||mu*||_1)

  std::string out_dir = ".";
  std::string format = "csv";

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  // Algorithm/problem compatibility and parameter sanity. Throws ConfigError.
  void validate() const;
};

// Named experiment bundles; each entry is an independently runnable config.
// Throws ConfigError listing the valid names on an unknown preset.
std::vector<RunConfig> preset_configs(const std::string& name);
std::vector<std::string> preset_names();

struct ExperimentResult {
  MetricsTrace trace;
  SolveReport reference;
};

// Runs the configured algorithm to its horizon. Fully deterministic: all
// randomness flows from the config seeds. Solver failures are rethrown with
// the config name attached.
ExperimentResult run_experiment(const RunConfig& cfg);

// Writes <stem>.csv (comment line with the oracle hash, header row, one row
// per round) and <stem>.summary.csv (final value, tail log-linear slope and
// R^2 per metric). Only "csv" is supported.
void emit_trace(const MetricsTrace& trace, const std::string& stem,
                const std::string& format = "csv");

// Inverse of emit_trace's data part; used for round-trip checks.
MetricsTrace parse_trace_csv(const std::string& path);

// Summary text (final values and tail fits) as written to the summary file.
std::string summarize_trace(const MetricsTrace& trace);

// Least-squares fit of log10(y) against t over the trailing fraction of the
// rows (positive values only). Returns {slope, r2}; {0, 0} when fewer than
// three usable points exist.
std::pair<double, double> tail_loglinear_fit(const std::vector<double>& t,
                                             const std::vector<double>& y,
                                             double tail_fraction = 0.25);

// Random feasible bounded LP for constraint-exchange runs: agent rows are
// unit-normal halfspaces kept at positive distance from the origin.
CCLinearProgram make_random_cc_lp(int n_agents, int d, std::uint64_t seed);

// `run <config.json>`, `preset <name>`, `oracle <config.json|name>`,
// `validate <config.json>`; flags --seed, --rounds, --out-dir, --format.
// Returns 0 on success, 2 on configuration errors, 3 on solver failures.
int cli_main(int argc, char** argv);

}  // namespace dopt

#endif  // DOPT_HARNESS_HPP
