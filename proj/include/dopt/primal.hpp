#ifndef DOPT_PRIMAL_HPP
#define DOPT_PRIMAL_HPP

#include <Eigen/Dense>
#include <functional>

#include "dopt/graph.hpp"
#include "dopt/metrics.hpp"
#include "dopt/problems.hpp"
#include "dopt/schedule.hpp"
#include "dopt/solve_report.hpp"

namespace dopt {

struct SubgradientAgentState {
  Eigen::VectorXd x;
};

struct TrackingAgentState {
  Eigen::VectorXd x;
  Eigen::VectorXd y;          // average-gradient tracker
  Eigen::VectorXd last_grad;  // gradient at the current x
};

// One agent round of the distributed subgradient method: mix the neighbor
// estimates first (v = sum_j a_ij x_j including the self term), then take a
// subgradient step evaluated at v.
SubgradientAgentState dsg_step(const SubgradientAgentState& self,
                               const std::vector<Eigen::VectorXd>& neighbor_x,
                               const Eigen::VectorXd& weights_row,
                               const FunctionOracle& f, double gamma);

// One agent round of gradient tracking: x is mixed and moved along the
// tracker, then the tracker is mixed and receives the gradient innovation.
// Both mixes use the same weights row; the oracle must be smooth.
TrackingAgentState gt_step(const TrackingAgentState& self,
                           const std::vector<Eigen::VectorXd>& neighbor_x,
                           const std::vector<Eigen::VectorXd>& neighbor_y,
                           const Eigen::VectorXd& weights_row,
                           const FunctionOracle& f, double gamma);

// Initial tracker state y_i = grad f_i(x_i).
TrackingAgentState gt_init(const Eigen::VectorXd& x0, const FunctionOracle& f);

enum class PrimalAlgorithm { Dsg, Gt };

struct InitPolicy {
  enum class Kind { Zeros, Gaussian, Point } kind = Kind::Zeros;
  std::uint64_t seed = 0;          // Gaussian
  Eigen::VectorXd point;           // Point: every agent starts here
};

struct PrimalRunResult {
  MetricsTrace trace;  // columns: t, cost_error, consensus_error[, tracking_error]
  Eigen::MatrixXd X;   // final per-agent estimates, one row per agent
  Eigen::MatrixXd Y;   // final trackers (Gt only)
};

struct PrimalRunOptions {
  PrimalAlgorithm algorithm = PrimalAlgorithm::Dsg;
  StepSchedule schedule;
  long rounds = 1000;
  InitPolicy init;
  // Called after every round with (t, X, Y); Y is empty for Dsg. Used by
  // invariant checks; leave unset for plain runs.
  std::function<void(long, const Eigen::MatrixXd&, const Eigen::MatrixXd&)> observer;
  // Reference optimum; cost_error is measured against its value.
  SolveReport reference;
};

// Synchronous-round simulation over a fixed doubly stochastic weight
// matrix. Vectorized (one weight GEMM per mix) but round-equivalent to the
// per-agent steps above.
PrimalRunResult run_primal(const CostCoupledProblem& prob,
                           const WeightMatrix& weights,
                           const PrimalRunOptions& opt);

}  // namespace dopt

#endif  // DOPT_PRIMAL_HPP
