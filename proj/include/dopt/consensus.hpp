#ifndef DOPT_CONSENSUS_HPP
#define DOPT_CONSENSUS_HPP

#include <Eigen/Dense>

#include "dopt/graph.hpp"

namespace dopt {

// Per-agent estimates stacked as rows: z.row(i) is agent i's vector.
struct ConsensusState {
  Eigen::MatrixXd z;  // N x d

  int n() const { return static_cast<int>(z.rows()); }
  int dim() const { return static_cast<int>(z.cols()); }
  Eigen::RowVectorXd mean() const { return z.colwise().mean(); }
};

// Push-sum state: mass scalars phi, numerators s, and ratios z = s / phi.
struct PushSumState {
  Eigen::VectorXd phi;  // N, positive
  Eigen::MatrixXd s;    // N x d
  Eigen::MatrixXd z;    // N x d, row i = s.row(i) / phi(i)

  static PushSumState init(const Eigen::MatrixXd& z0);
  int n() const { return static_cast<int>(s.rows()); }
};

// Dynamic average consensus state: estimates plus one sample of signal memory.
struct DynAvgState {
  Eigen::MatrixXd z;       // N x d
  Eigen::MatrixXd last_r;  // N x d, signal values at the current round

  static DynAvgState init(const Eigen::MatrixXd& r0);  // z^0 = r^0
  int n() const { return static_cast<int>(z.rows()); }
};

// z <- A z. Preserves the agent mean (doubly stochastic A).
ConsensusState average_consensus_step(const ConsensusState& st,
                                      const WeightMatrix& w);

// phi <- B phi, s <- B s, z <- s / phi. Column-stochastic B preserves the
// total mass sum(phi) = N and the numerator sums. Throws on nonpositive phi.
PushSumState push_sum_step(const PushSumState& st, const WeightMatrix& w);

// z <- A z + (r_next - last_r); the stored signal memory becomes r_next.
DynAvgState dynamic_average_step(const DynAvgState& st, const WeightMatrix& w,
                                 const Eigen::MatrixXd& r_next);

}  // namespace dopt

#endif  // DOPT_CONSENSUS_HPP
