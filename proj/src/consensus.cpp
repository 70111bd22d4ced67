#include "dopt/consensus.hpp"

#include <stdexcept>

namespace dopt {

PushSumState PushSumState::init(const Eigen::MatrixXd& z0) {
  PushSumState st;
  st.phi = Eigen::VectorXd::Ones(z0.rows());
  st.s = z0;
  st.z = z0;
  return st;
}

DynAvgState DynAvgState::init(const Eigen::MatrixXd& r0) {
  DynAvgState st;
  st.z = r0;
  st.last_r = r0;
  return st;
}

ConsensusState average_consensus_step(const ConsensusState& st,
                                      const WeightMatrix& w) {
  if (w.kind != Stochasticity::Doubly)
    throw std::invalid_argument("average_consensus_step: needs doubly stochastic weights");
  if (w.n() != st.n())
    throw std::invalid_argument("average_consensus_step: agent count mismatch");
  return ConsensusState{w.a * st.z};
}

PushSumState push_sum_step(const PushSumState& st, const WeightMatrix& w) {
  if (w.kind != Stochasticity::Column)
    throw std::invalid_argument("push_sum_step: needs column stochastic weights");
  if (w.n() != st.n())
    throw std::invalid_argument("push_sum_step: agent count mismatch");
  PushSumState next;
  next.phi = w.a * st.phi;
  next.s = w.a * st.s;
  if ((next.phi.array() <= 0.0).any())
    throw std::runtime_error("push_sum_step: nonpositive mass phi_i (inconsistent state)");
  next.z = next.phi.cwiseInverse().asDiagonal() * next.s;
  return next;
}

DynAvgState dynamic_average_step(const DynAvgState& st, const WeightMatrix& w,
                                 const Eigen::MatrixXd& r_next) {
  if (w.kind != Stochasticity::Doubly)
    throw std::invalid_argument("dynamic_average_step: needs doubly stochastic weights");
  if (w.n() != st.n())
    throw std::invalid_argument("dynamic_average_step: agent count mismatch");
  if (r_next.rows() != st.last_r.rows() || r_next.cols() != st.last_r.cols())
    throw std::invalid_argument("dynamic_average_step: signal dimension drift");
  DynAvgState next;
  next.z = w.a * st.z + (r_next - st.last_r);
  next.last_r = r_next;
  return next;
}

}  // namespace dopt
