#ifndef DOPT_DUAL_HPP
#define DOPT_DUAL_HPP

#include <Eigen/Dense>
#include <functional>
#include <map>

#include "dopt/graph.hpp"
#include "dopt/localsolve.hpp"
#include "dopt/metrics.hpp"
#include "dopt/problems.hpp"
#include "dopt/schedule.hpp"

namespace dopt {

// ---------------------------------------------------------------------------
// Distributed dual decomposition (edge-wise coherence multipliers)
// ---------------------------------------------------------------------------

struct DualDecAgentState {
  Eigen::VectorXd x;
  std::map<int, Eigen::VectorXd> lambda_out;  // lambda_ij, keyed by neighbor j
};

// Primal phase: argmin_{x in X} f(x) + x' sum_j (lambda_ij - lambda_ji)
// given the multipliers just gathered from the neighbors. Returns the full
// solve so the runner can accumulate the dual value q(Lambda).
SolveReport ddec_primal_update(const DualDecAgentState& s,
                               const std::map<int, Eigen::VectorXd>& lambda_in,
                               const FunctionOracle& f, const SetOracle& X);

// Full round: primal update, then per-neighbor dual ascent
// lambda_ij += gamma (x_i - x_j) using the gathered neighbor minimizers.
DualDecAgentState ddec_step(const DualDecAgentState& s,
                            const std::map<int, Eigen::VectorXd>& lambda_in,
                            const std::map<int, Eigen::VectorXd>& neighbor_x,
                            const FunctionOracle& f, const SetOracle& X,
                            double gamma);

// ---------------------------------------------------------------------------
// Distributed ADMM
// ---------------------------------------------------------------------------

struct AdmmAgentState {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  std::map<int, Eigen::VectorXd> lambda;  // lambda_ij for j in N_i and j = i
  double rho = 0.1;
};

struct AdmmMessages {
  std::map<int, Eigen::VectorXd> lambda_in;  // lambda_ji^t from each neighbor
  std::map<int, Eigen::VectorXd> z_prev;     // z_j^t gathered last round
  std::map<int, Eigen::VectorXd> x_new;      // x_j^{t+1}
  std::map<int, Eigen::VectorXd> z_new;      // z_j^{t+1}
};

// x-update: argmin_{X} f + (sum_j lambda_ij + lambda_ii)'x
//           + (rho/2) sum_{j in N_i u {i}} ||x - z_j||^2.
Eigen::VectorXd dadmm_primal_update(const AdmmAgentState& s,
                                    const std::map<int, Eigen::VectorXd>& z_prev,
                                    const FunctionOracle& f, const SetOracle& X);

// z-update closed form: neighborhood average of the new x's plus the
// received multipliers scaled by 1/(rho (|N_i|+1)).
Eigen::VectorXd dadmm_z_update(const Eigen::VectorXd& own_x_new,
                               const std::map<int, Eigen::VectorXd>& x_new,
                               const std::map<int, Eigen::VectorXd>& lambda_in,
                               const Eigen::VectorXd& lambda_ii, double rho);

// Whole round (three gather phases) as one composition.
AdmmAgentState dadmm_step(const AdmmAgentState& s, const AdmmMessages& msgs,
                          const FunctionOracle& f, const SetOracle& X);

// ---------------------------------------------------------------------------
// Distributed dual subgradient (constraint-coupled)
// ---------------------------------------------------------------------------

struct DualSubgrAgentState {
  Eigen::VectorXd mu;     // coupling multiplier estimate, >= 0
  Eigen::VectorXd x;      // latest Lagrangian minimizer (full x+aux coords)
  Eigen::VectorXd x_hat;  // running average of the minimizers
  long t = 0;             // rounds completed
};

DualSubgrAgentState dual_subgradient_step(
    const DualSubgrAgentState& s, const std::vector<Eigen::VectorXd>& neighbor_mu,
    const Eigen::VectorXd& weights_row, const AgentPiece& piece, double gamma);

// Exact incremental mean over samples x^0..x^t (t+1 terms).
Eigen::VectorXd running_average_update(const Eigen::VectorXd& x_hat,
                                       const Eigen::VectorXd& x_new, long t);

// ---------------------------------------------------------------------------
// Relaxation and successive distributed decomposition (RSDD)
// ---------------------------------------------------------------------------

struct RsddAgentState {
  Eigen::VectorXd x;   // full x+aux coordinates
  double rho_i = 0.0;  // local violation slack, >= 0
  Eigen::VectorXd mu;  // multiplier of the relaxed coupling rows, >= 0
  std::map<int, Eigen::VectorXd> lambda_out;  // lambda_ij per neighbor
  double M = 0.0;
};

// Local phase: primal-dual solve of
//   min f_i(x) + M rho  s.t. x in X_i, rho >= 0,
//       g_i(x) + sum_j (lambda_ij - lambda_ji) <= rho 1.
// Fills x, rho_i, mu; lambda stays untouched.
RsddAgentState rsdd_local_solve(const RsddAgentState& s,
                                const std::map<int, Eigen::VectorXd>& lambda_in,
                                const AgentPiece& piece);

// Full round: local solve, then lambda_ij -= gamma (mu_i - mu_j) with the
// gathered neighbor multipliers.
RsddAgentState rsdd_step(const RsddAgentState& s,
                         const std::map<int, Eigen::VectorXd>& lambda_in,
                         const std::map<int, Eigen::VectorXd>& neighbor_mu,
                         const AgentPiece& piece, double gamma);

// ---------------------------------------------------------------------------
// Master-coordinated baselines
// ---------------------------------------------------------------------------

struct ParallelDualState {
  std::vector<Eigen::VectorXd> lambda;  // per-agent, sum_i lambda_i = 0
  std::vector<Eigen::VectorXd> x;
};

// Parallel dual decomposition: each lambda_i ascends along its minimizer,
// then the stack is projected back onto {sum_i lambda_i = 0} by mean
// subtraction.
ParallelDualState parallel_ddec_round(const ParallelDualState& s,
                                      const std::vector<FunctionOracle>& f,
                                      const SetOracle& X, double gamma);

struct ParallelAdmmState {
  Eigen::VectorXd z;
  std::vector<Eigen::VectorXd> lambda;
  std::vector<Eigen::VectorXd> x;
  double rho = 0.1;
};

// Parallel ADMM round: x_i-updates against the master z, then
// z = mean(x) + mean(lambda)/rho, then lambda_i += rho (x_i - z).
ParallelAdmmState parallel_admm_round(const ParallelAdmmState& s,
                                      const std::vector<FunctionOracle>& f,
                                      const SetOracle& X);

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

struct DualRunResult {
  MetricsTrace trace;
  std::vector<DualDecAgentState> ddec;
  std::vector<AdmmAgentState> admm;
  std::vector<DualSubgrAgentState> subgr;
  std::vector<RsddAgentState> rsdd;
};

struct DdecRunOptions {
  StepSchedule schedule = StepSchedule::power(1.0, 0.7);
  long rounds = 1000;
  SolveReport reference;
  std::function<void(long, const std::vector<DualDecAgentState>&)> observer;
};

// Columns: t, cost_error, dual_cost_error, consensus_error, distance_to_opt.
DualRunResult run_ddec(const CostCoupledProblem& prob, const CommGraph& graph,
                       const DdecRunOptions& opt);

struct DadmmRunOptions {
  double rho = 0.1;
  long rounds = 1000;
  SolveReport reference;
  std::function<void(long, const std::vector<AdmmAgentState>&)> observer;
};

// Columns: t, cost_error, consensus_error, spread, distance_to_opt.
DualRunResult run_dadmm(const CostCoupledProblem& prob, const CommGraph& graph,
                        const DadmmRunOptions& opt);

struct DualSubgrRunOptions {
  StepSchedule schedule = StepSchedule::power(0.1, 0.7);
  long rounds = 1000;
  SolveReport reference;  // multipliers = coupling mu*
  std::function<void(long, const std::vector<DualSubgrAgentState>&)> observer;
};

// Columns: t, mu_consensus, avg_cost_error, avg_coupling_violation.
DualRunResult run_dual_subgradient(const ConstraintCoupledProblem& prob,
                                   const WeightMatrix& weights,
                                   const DualSubgrRunOptions& opt);

struct RsddRunOptions {
  StepSchedule schedule = StepSchedule::power(0.1, 0.7);
  double M = 0.0;  // <= 0 selects 10 ||mu*||_1 from the reference
  long rounds = 1000;
  SolveReport reference;
  std::function<void(long, const std::vector<RsddAgentState>&)> observer;
};

// Columns: t, cost_error, max_coupling_violation, sum_rho, rsdd_tracking.
DualRunResult run_rsdd(const ConstraintCoupledProblem& prob,
                       const CommGraph& graph, const RsddRunOptions& opt);

}  // namespace dopt

#endif  // DOPT_DUAL_HPP
