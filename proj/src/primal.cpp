#include "dopt/primal.hpp"

#include <cmath>
#include <stdexcept>

#include "dopt/rng.hpp"

namespace dopt {

namespace {

Eigen::VectorXd mix(const std::vector<Eigen::VectorXd>& xs,
                    const Eigen::VectorXd& w) {
  if (static_cast<int>(xs.size()) != w.size())
    throw std::invalid_argument("mix: weights row length must equal the number of estimates");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(xs.front().size());
  for (int j = 0; j < w.size(); ++j) {
    if (w(j) == 0.0) continue;
    if (xs[j].size() != v.size()) throw std::invalid_argument("mix: estimate dimension mismatch");
    v += w(j) * xs[j];
  }
  return v;
}

}  // namespace

SubgradientAgentState dsg_step(const SubgradientAgentState& self,
                               const std::vector<Eigen::VectorXd>& neighbor_x,
                               const Eigen::VectorXd& weights_row,
                               const FunctionOracle& f, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("dsg_step: gamma must be >= 0");
  if (self.x.size() != f.dim) throw std::invalid_argument("dsg_step: state dimension mismatch");
  const Eigen::VectorXd v = mix(neighbor_x, weights_row);
  SubgradientAgentState next;
  next.x = v - gamma * f.subgradient(v);
  return next;
}

TrackingAgentState gt_init(const Eigen::VectorXd& x0, const FunctionOracle& f) {
  if (!f.smooth) throw std::invalid_argument("gradient tracking needs a smooth oracle");
  TrackingAgentState s;
  s.x = x0;
  s.last_grad = f.subgradient(x0);
  s.y = s.last_grad;
  return s;
}

TrackingAgentState gt_step(const TrackingAgentState& self,
                           const std::vector<Eigen::VectorXd>& neighbor_x,
                           const std::vector<Eigen::VectorXd>& neighbor_y,
                           const Eigen::VectorXd& weights_row,
                           const FunctionOracle& f, double gamma) {
  if (!f.smooth) throw std::invalid_argument("gt_step: needs a smooth (gradient) oracle");
  TrackingAgentState next;
  next.x = mix(neighbor_x, weights_row) - gamma * self.y;
  next.last_grad = f.subgradient(next.x);
  next.y = mix(neighbor_y, weights_row) + next.last_grad - self.last_grad;
  return next;
}

PrimalRunResult run_primal(const CostCoupledProblem& prob,
                           const WeightMatrix& weights,
                           const PrimalRunOptions& opt) {
  const int N = prob.n_agents();
  const int d = prob.d;
  if (weights.a.rows() != N)
    throw std::invalid_argument("run_primal: weight matrix size does not match the agent count");
  validate_weights(weights);
  if (weights.kind != Stochasticity::Doubly)
    throw std::invalid_argument("run_primal: doubly stochastic weights required");
  const bool gt = opt.algorithm == PrimalAlgorithm::Gt;
  if (gt)
    for (const auto& f : prob.agents)
      if (!f.smooth) throw std::invalid_argument("run_primal: gradient tracking needs smooth oracles");

  Eigen::MatrixXd X(N, d);
  switch (opt.init.kind) {
    case InitPolicy::Kind::Zeros:
      X.setZero();
      break;
    case InitPolicy::Kind::Gaussian: {
      Rng rng(opt.init.seed);
      for (int i = 0; i < N; ++i)
        for (int k = 0; k < d; ++k) X(i, k) = rng.normal();
      break;
    }
    case InitPolicy::Kind::Point:
      if (opt.init.point.size() != d)
        throw std::invalid_argument("run_primal: init point dimension mismatch");
      X = opt.init.point.transpose().replicate(N, 1);
      break;
  }

  auto grads_at = [&](const Eigen::MatrixXd& Z) {
    Eigen::MatrixXd G(N, d);
    for (int i = 0; i < N; ++i)
      G.row(i) = prob.agents[i].subgradient(Z.row(i).transpose()).transpose();
    return G;
  };

  PrimalRunResult out;
  out.trace.oracle_hash = report_hash(opt.reference);
  out.trace.columns = {"t", "cost_error", "consensus_error"};
  if (gt) out.trace.columns.push_back("tracking_error");

  Eigen::MatrixXd Y, G;
  if (gt) {
    G = grads_at(X);
    Y = G;
  }

  auto record = [&](long t) {
    double cost = 0.0;
    for (int i = 0; i < N; ++i) cost += prob.agents[i].value(X.row(i).transpose());
    const Eigen::RowVectorXd xbar = X.colwise().mean();
    double cons = 0.0;
    for (int i = 0; i < N; ++i) cons += (X.row(i) - xbar).norm();
    std::vector<double> row = {static_cast<double>(t),
                               std::abs(cost - opt.reference.value), cons};
    if (gt) {
      const Eigen::RowVectorXd ybar = Y.colwise().mean();
      double trk = 0.0;
      for (int i = 0; i < N; ++i) trk += (Y.row(i) - ybar).norm();
      row.push_back(trk);
    }
    for (double v : row)
      if (std::isnan(v))
        throw std::runtime_error("run_primal: NaN metric at round " + std::to_string(t));
    out.trace.add_row(std::move(row));
  };

  record(0);
  if (opt.observer) opt.observer(0, X, Y);
  for (long t = 0; t < opt.rounds; ++t) {
    const double gamma = opt.schedule.at(t);
    if (gt) {
      const Eigen::MatrixXd Xn = weights.a * X - gamma * Y;
      const Eigen::MatrixXd Gn = grads_at(Xn);
      Y = weights.a * Y + Gn - G;
      X = Xn;
      G = Gn;
    } else {
      const Eigen::MatrixXd V = weights.a * X;
      X = V - gamma * grads_at(V);
    }
    record(t + 1);
    if (opt.observer) opt.observer(t + 1, X, Y);
  }
  out.X = X;
  out.Y = Y;
  return out;
}

}  // namespace dopt
