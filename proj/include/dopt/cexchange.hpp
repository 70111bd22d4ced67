#ifndef DOPT_CEXCHANGE_HPP
#define DOPT_CEXCHANGE_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "dopt/graph.hpp"
#include "dopt/localsolve.hpp"
#include "dopt/metrics.hpp"
#include "dopt/problems.hpp"

namespace dopt {

// Exchanged message of the constraint-exchange algorithms. LP mode carries
// explicit rows; convex mode carries whole constraint descriptors. Origin
// tags name the agent whose initial constraint a payload came from (-1 for
// bounding-box rows).
struct ExchBasis {
  bool lp_mode = true;
  // LP mode (exactly d rows at steady state)
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;
  std::vector<int> origins;
  // Convex mode (at most delta descriptors; descriptors keep their origin)
  std::vector<ConstraintDescriptor> descriptors;

  int size() const {
    return lp_mode ? static_cast<int>(rhs.size())
                   : static_cast<int>(descriptors.size());
  }
  // Canonical little-endian serialization (tag byte + payload doubles).
  std::string serialize() const;
};

struct CCAgentState {
  int id = -1;  // origin tag carried by the agent's own payloads
  Eigen::VectorXd x;
  ExchBasis basis;
  // The agent's own constraint, re-imposed at every local solve.
  Eigen::RowVectorXd own_row;  // LP mode
  double own_rhs = 0.0;
  std::vector<ConstraintDescriptor> own_descriptors;  // convex mode
  double M = 0.0;  // bounding-box radius
  bool infeasible = false;
};

struct HaltState {
  int stable_rounds = 0;
  int threshold = 0;

  // Counts unchanged rounds; returns true (halt) once the count reaches
  // the threshold. Any change resets the counter.
  bool update(bool changed) {
    stable_rounds = changed ? 0 : stable_rounds + 1;
    return stable_rounds >= threshold;
  }
};

// Halting threshold per graph class: 2 diam(G) + 1 for a fixed graph,
// 2 N T + 1 for a T-strongly-connected time-varying schedule (window
// required from the schedule).
int halting_threshold(const GraphSchedule& sched);

// One agent round of Constraints Consensus for LPs: lex-solve over the own
// row, the current basis, the neighbor bases and the box, then extract the
// new basis. Sets `infeasible` when the aggregation is infeasible (which
// certifies the pooled problem infeasible).
CCAgentState cc_lp_step(const CCAgentState& s,
                        const std::vector<const ExchBasis*>& neighbor_bases,
                        const Eigen::VectorXd& c);

// Convex variant exchanging constraint descriptors; delta is the maximum
// basis cardinality (decision dimension + 1 in epigraph mode). cost_P may
// be empty (linear cost).
CCAgentState cc_convex_step(const CCAgentState& s,
                            const std::vector<const ExchBasis*>& neighbor_bases,
                            const Eigen::VectorXd& c,
                            const Eigen::MatrixXd& cost_P, int delta);

// LP instance for constraint exchange: agent i owns row i of A x <= b.
struct CCLinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double M = 10.0;
};

struct CCRunOptions {
  long max_rounds = 10000;
  SolveReport reference;  // pooled lex optimum (metrics only)
  std::function<void(long, const std::vector<CCAgentState>&)> observer;
};

struct CCRunResult {
  // Columns: t, cost_min, cost_max, max_violation, max_dist_to_ref.
  MetricsTrace trace;
  std::vector<CCAgentState> agents;
  bool all_halted = false;
  bool infeasible = false;
  long rounds = 0;
};

CCRunResult run_cc_lp(const CCLinearProgram& lp, const GraphSchedule& sched,
                      const CCRunOptions& opt);

// Convex constraint exchange over a common-cost problem (agents hold the
// descriptor lists of prob.agent_sets).
CCRunResult run_cc_convex(const CommonCostProblem& prob,
                          const GraphSchedule& sched, const CCRunOptions& opt);

}  // namespace dopt

#endif  // DOPT_CEXCHANGE_HPP
