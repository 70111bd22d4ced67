#include "dopt/dual.hpp"

#include <cmath>
#include <stdexcept>

namespace dopt {

namespace {

Eigen::VectorXd lambda_imbalance(const std::map<int, Eigen::VectorXd>& out,
                                 const std::map<int, Eigen::VectorXd>& in,
                                 int dim) {
  Eigen::VectorXd ell = Eigen::VectorXd::Zero(dim);
  for (const auto& [j, lam] : out) {
    ell += lam;
    const auto it = in.find(j);
    if (it == in.end())
      throw std::invalid_argument("missing incoming multiplier from neighbor " + std::to_string(j));
    ell -= it->second;
  }
  return ell;
}

void check_solved(const SolveReport& rep, const char* who) {
  if (rep.status != SolveStatus::Optimal)
    throw std::runtime_error(std::string(who) + ": local minimization returned " + to_string(rep.status));
}

}  // namespace

// ---------------------------------------------------------------------------
// Distributed dual decomposition
// ---------------------------------------------------------------------------

SolveReport ddec_primal_update(const DualDecAgentState& s,
                               const std::map<int, Eigen::VectorXd>& lambda_in,
                               const FunctionOracle& f, const SetOracle& X) {
  const Eigen::VectorXd ell = lambda_imbalance(s.lambda_out, lambda_in, f.dim);
  SolveReport rep = regularized_argmin(f, X, ell, {}, 0.0);
  if (rep.status == SolveStatus::Unbounded)
    throw std::runtime_error("ddec: unbounded local minimization (compactness assumption violated)");
  check_solved(rep, "ddec");
  return rep;
}

DualDecAgentState ddec_step(const DualDecAgentState& s,
                            const std::map<int, Eigen::VectorXd>& lambda_in,
                            const std::map<int, Eigen::VectorXd>& neighbor_x,
                            const FunctionOracle& f, const SetOracle& X,
                            double gamma) {
  DualDecAgentState next = s;
  next.x = ddec_primal_update(s, lambda_in, f, X).x;
  for (auto& [j, lam] : next.lambda_out) {
    const auto it = neighbor_x.find(j);
    if (it == neighbor_x.end())
      throw std::invalid_argument("ddec_step: missing minimizer from neighbor " + std::to_string(j));
    lam += gamma * (next.x - it->second);
  }
  return next;
}

DualRunResult run_ddec(const CostCoupledProblem& prob, const CommGraph& graph,
                       const DdecRunOptions& opt) {
  if (graph.directed()) throw std::invalid_argument("run_ddec: undirected graph required");
  const int N = prob.n_agents();
  const int d = prob.d;
  std::vector<DualDecAgentState> st(N);
  for (int i = 0; i < N; ++i) {
    st[i].x = Eigen::VectorXd::Zero(d);
    for (int j : graph.neighbors(i)) st[i].lambda_out[j] = Eigen::VectorXd::Zero(d);
  }

  DualRunResult out;
  out.trace.oracle_hash = report_hash(opt.reference);
  out.trace.columns = {"t", "cost_error", "dual_cost_error", "consensus_error",
                       "distance_to_opt"};

  for (long t = 0; t < opt.rounds; ++t) {
    const double gamma = opt.schedule.at(t + 1);
    // Gather multipliers, run all primal updates on the round-t state.
    std::vector<Eigen::VectorXd> x_new(N);
    double dual_value = 0.0;
    for (int i = 0; i < N; ++i) {
      std::map<int, Eigen::VectorXd> lam_in;
      for (int j : graph.neighbors(i)) lam_in[j] = st[j].lambda_out.at(i);
      const SolveReport rep = ddec_primal_update(st[i], lam_in, prob.agents[i], prob.constraint);
      x_new[i] = rep.x;
      dual_value += rep.value;
    }
    // Dual ascent with the freshly exchanged minimizers.
    for (int i = 0; i < N; ++i) {
      st[i].x = x_new[i];
      for (auto& [j, lam] : st[i].lambda_out) lam += gamma * (x_new[i] - x_new[j]);
    }

    double cost = 0.0;
    Eigen::VectorXd xbar = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < N; ++i) {
      cost += prob.agents[i].value(st[i].x);
      xbar += st[i].x;
    }
    xbar /= N;
    double cons = 0.0, dist = 0.0;
    for (int i = 0; i < N; ++i) {
      cons += (st[i].x - xbar).norm();
      dist = std::max(dist, (st[i].x - opt.reference.x).norm());
    }
    out.trace.add_row({static_cast<double>(t + 1), std::abs(cost - opt.reference.value),
                       std::abs(dual_value - opt.reference.value), cons, dist});
    if (opt.observer) opt.observer(t + 1, st);
  }
  out.ddec = std::move(st);
  return out;
}

// ---------------------------------------------------------------------------
// Distributed ADMM
// ---------------------------------------------------------------------------

Eigen::VectorXd dadmm_primal_update(const AdmmAgentState& s,
                                    const std::map<int, Eigen::VectorXd>& z_prev,
                                    const FunctionOracle& f, const SetOracle& X) {
  Eigen::VectorXd ell = Eigen::VectorXd::Zero(f.dim);
  for (const auto& [j, lam] : s.lambda) ell += lam;
  std::vector<Anchor> anchors;
  for (const auto& [j, z] : z_prev) anchors.push_back({1.0, z});
  if (anchors.size() != s.lambda.size())
    throw std::invalid_argument("dadmm_primal_update: z cache does not cover the closed neighborhood");
  SolveReport rep = regularized_argmin(f, X, ell, anchors, s.rho);
  check_solved(rep, "dadmm");
  return rep.x;
}

Eigen::VectorXd dadmm_z_update(const Eigen::VectorXd& own_x_new,
                               const std::map<int, Eigen::VectorXd>& x_new,
                               const std::map<int, Eigen::VectorXd>& lambda_in,
                               const Eigen::VectorXd& lambda_ii, double rho) {
  const double denom = static_cast<double>(x_new.size()) + 1.0;
  Eigen::VectorXd xsum = own_x_new;
  for (const auto& [j, x] : x_new) xsum += x;
  Eigen::VectorXd lsum = lambda_ii;
  for (const auto& [j, lam] : lambda_in) lsum += lam;
  return xsum / denom + lsum / (rho * denom);
}

AdmmAgentState dadmm_step(const AdmmAgentState& s, const AdmmMessages& msgs,
                          const FunctionOracle& f, const SetOracle& X) {
  AdmmAgentState next = s;
  next.x = dadmm_primal_update(s, msgs.z_prev, f, X);
  next.z = dadmm_z_update(next.x, msgs.x_new, msgs.lambda_in, s.lambda.at(-1), s.rho);
  for (auto& [j, lam] : next.lambda) {
    const Eigen::VectorXd& zj = (j == -1) ? next.z : msgs.z_new.at(j);
    lam += s.rho * (next.x - zj);
  }
  return next;
}

DualRunResult run_dadmm(const CostCoupledProblem& prob, const CommGraph& graph,
                        const DadmmRunOptions& opt) {
  if (graph.directed()) throw std::invalid_argument("run_dadmm: undirected graph required");
  if (opt.rho <= 0.0) throw std::invalid_argument("run_dadmm: rho must be > 0");
  const int N = prob.n_agents();
  const int d = prob.d;
  std::vector<AdmmAgentState> st(N);
  for (int i = 0; i < N; ++i) {
    st[i].x = Eigen::VectorXd::Zero(d);
    st[i].z = Eigen::VectorXd::Zero(d);
    st[i].rho = opt.rho;
    st[i].lambda[-1] = Eigen::VectorXd::Zero(d);  // lambda_ii keyed by -1
    for (int j : graph.neighbors(i)) st[i].lambda[j] = Eigen::VectorXd::Zero(d);
  }

  DualRunResult out;
  out.trace.oracle_hash = report_hash(opt.reference);
  out.trace.columns = {"t", "cost_error", "consensus_error", "spread",
                       "distance_to_opt"};

  std::vector<Eigen::VectorXd> x_new(N), z_new(N);
  for (long t = 0; t < opt.rounds; ++t) {
    // Phase 1-2: gather multipliers and previous z's, update all x.
    for (int i = 0; i < N; ++i) {
      std::map<int, Eigen::VectorXd> z_prev;
      z_prev[-1] = st[i].z;
      for (int j : graph.neighbors(i)) z_prev[j] = st[j].z;
      x_new[i] = dadmm_primal_update(st[i], z_prev, prob.agents[i], prob.constraint);
    }
    // Phase 3: everyone averages the new neighborhood minimizers.
    for (int i = 0; i < N; ++i) {
      std::map<int, Eigen::VectorXd> xs, lam_in;
      for (int j : graph.neighbors(i)) {
        xs[j] = x_new[j];
        lam_in[j] = st[j].lambda.at(i);
      }
      z_new[i] = dadmm_z_update(x_new[i], xs, lam_in, st[i].lambda.at(-1), opt.rho);
    }
    // Dual updates with the gathered new z's.
    for (int i = 0; i < N; ++i) {
      st[i].x = x_new[i];
      st[i].z = z_new[i];
      for (auto& [j, lam] : st[i].lambda)
        lam += opt.rho * (x_new[i] - ((j == -1) ? z_new[i] : z_new[j]));
    }

    double cost = 0.0;
    Eigen::VectorXd xbar = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < N; ++i) {
      cost += prob.agents[i].value(st[i].x);
      xbar += st[i].x;
    }
    xbar /= N;
    double cons = 0.0, spread = 0.0, dist = 0.0;
    for (int i = 0; i < N; ++i) {
      cons += (st[i].x - xbar).norm();
      dist = std::max(dist, (st[i].x - opt.reference.x).norm());
      for (int j = i + 1; j < N; ++j)
        spread = std::max(spread, (st[i].x - st[j].x).norm());
    }
    out.trace.add_row({static_cast<double>(t + 1), std::abs(cost - opt.reference.value),
                       cons, spread, dist});
    if (opt.observer) opt.observer(t + 1, st);
  }
  out.admm = std::move(st);
  return out;
}

// ---------------------------------------------------------------------------
// Distributed dual subgradient
// ---------------------------------------------------------------------------

Eigen::VectorXd running_average_update(const Eigen::VectorXd& x_hat,
                                       const Eigen::VectorXd& x_new, long t) {
  if (t < 0) throw std::invalid_argument("running_average_update: t must be >= 0");
  return x_hat + (x_new - x_hat) / static_cast<double>(t + 1);
}

namespace {

// argmin_{x in X_i} f_i(x) + v' g_i(x) for affine coupling rows.
SolveReport lagrangian_argmin(const AgentPiece& piece, const Eigen::VectorXd& v) {
  QpProblem p = piece.local;
  const int dim = piece.d + piece.n_aux;
  if (p.q.size() == 0) p.q = Eigen::VectorXd::Zero(dim);
  p.q += piece.G.transpose() * v;
  SolveReport rep = primal_dual_solve(p);
  check_solved(rep, "dual subgradient");
  return rep;
}

}  // namespace

DualSubgrAgentState dual_subgradient_step(
    const DualSubgrAgentState& s, const std::vector<Eigen::VectorXd>& neighbor_mu,
    const Eigen::VectorXd& weights_row, const AgentPiece& piece, double gamma) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(s.mu.size());
  if (static_cast<int>(neighbor_mu.size()) != weights_row.size())
    throw std::invalid_argument("dual_subgradient_step: weights row length mismatch");
  for (int j = 0; j < weights_row.size(); ++j)
    if (weights_row(j) != 0.0) v += weights_row(j) * neighbor_mu[j];

  DualSubgrAgentState next;
  next.x = lagrangian_argmin(piece, v).x;
  next.mu = (v + gamma * piece.g(next.x)).cwiseMax(0.0);
  if (next.mu.minCoeff() < 0.0)
    throw std::logic_error("dual_subgradient_step: negative multiplier after projection");
  next.x_hat = (s.t == 0) ? next.x : running_average_update(s.x_hat, next.x, s.t);
  next.t = s.t + 1;
  return next;
}

DualRunResult run_dual_subgradient(const ConstraintCoupledProblem& prob,
                                   const WeightMatrix& weights,
                                   const DualSubgrRunOptions& opt) {
  validate_weights(weights);
  if (weights.kind != Stochasticity::Doubly)
    throw std::invalid_argument("run_dual_subgradient: doubly stochastic weights required");
  const int N = prob.n_agents();
  const int S = prob.S;
  std::vector<DualSubgrAgentState> st(N);
  for (int i = 0; i < N; ++i) {
    st[i].mu = Eigen::VectorXd::Zero(S);
    st[i].x = Eigen::VectorXd::Zero(prob.agents[i].d + prob.agents[i].n_aux);
    st[i].x_hat = st[i].x;
  }

  DualRunResult out;
  out.trace.oracle_hash = report_hash(opt.reference);
  out.trace.columns = {"t", "mu_consensus", "avg_cost_error", "avg_coupling_violation"};

  for (long t = 0; t < opt.rounds; ++t) {
    const double gamma = opt.schedule.at(t + 1);
    std::vector<Eigen::VectorXd> mus(N);
    for (int i = 0; i < N; ++i) mus[i] = st[i].mu;
    std::vector<DualSubgrAgentState> next(N);
    for (int i = 0; i < N; ++i)
      next[i] = dual_subgradient_step(st[i], mus, weights.a.row(i), prob.agents[i], gamma);
    st = std::move(next);

    Eigen::VectorXd mubar = Eigen::VectorXd::Zero(S);
    for (int i = 0; i < N; ++i) mubar += st[i].mu;
    mubar /= N;
    double mu_cons = 0.0, cost = 0.0;
    Eigen::VectorXd viol = Eigen::VectorXd::Zero(S);
    for (int i = 0; i < N; ++i) {
      mu_cons = std::max(mu_cons, (st[i].mu - mubar).norm());
      cost += prob.agents[i].f.value(st[i].x_hat.head(prob.agents[i].d));
      viol += prob.agents[i].g(st[i].x_hat);
    }
    out.trace.add_row({static_cast<double>(t + 1), mu_cons,
                       std::abs(cost - opt.reference.value), viol.maxCoeff()});
    if (opt.observer) opt.observer(t + 1, st);
  }
  out.subgr = std::move(st);
  return out;
}

// ---------------------------------------------------------------------------
// RSDD
// ---------------------------------------------------------------------------

RsddAgentState rsdd_local_solve(const RsddAgentState& s,
                                const std::map<int, Eigen::VectorXd>& lambda_in,
                                const AgentPiece& piece) {
  const int dim = piece.d + piece.n_aux;
  const int S = static_cast<int>(piece.h.size());
  const Eigen::VectorXd delta = lambda_imbalance(s.lambda_out, lambda_in, S);

  // Variables (x, rho): relax the coupling rows into g_i(x) + delta <= rho 1.
  QpProblem p;
  const int k = static_cast<int>(piece.local.b.size());
  if (piece.local.P.size() > 0) {
    p.P = Eigen::MatrixXd::Zero(dim + 1, dim + 1);
    p.P.topLeftCorner(dim, dim) = piece.local.P;
  }
  p.q = Eigen::VectorXd::Zero(dim + 1);
  if (piece.local.q.size() > 0) p.q.head(dim) = piece.local.q;
  p.q(dim) = s.M;
  p.c0 = piece.local.c0;
  p.A = Eigen::MatrixXd::Zero(k + S + 1, dim + 1);
  p.b = Eigen::VectorXd::Zero(k + S + 1);
  if (k > 0) {
    p.A.topLeftCorner(k, dim) = piece.local.A;
    p.b.head(k) = piece.local.b;
  }
  p.A.block(k, 0, S, dim) = piece.G;
  p.A.block(k, dim, S, 1).setConstant(-1.0);
  p.b.segment(k, S) = -piece.h - delta;
  p.A(k + S, dim) = -1.0;  // rho >= 0
  if (piece.local.f.size() > 0) {
    p.E = Eigen::MatrixXd::Zero(piece.local.f.size(), dim + 1);
    p.E.topLeftCorner(piece.local.f.size(), dim) = piece.local.E;
    p.f = piece.local.f;
  }
  const SolveReport rep = primal_dual_solve(p);
  if (rep.status != SolveStatus::Optimal)
    throw std::logic_error("rsdd: the relaxed local problem is feasible by construction; solver returned " + to_string(rep.status));
  RsddAgentState next = s;
  next.x = rep.x.head(dim);
  next.rho_i = rep.x(dim);
  next.mu = rep.multipliers.segment(k, S);
  return next;
}

RsddAgentState rsdd_step(const RsddAgentState& s,
                         const std::map<int, Eigen::VectorXd>& lambda_in,
                         const std::map<int, Eigen::VectorXd>& neighbor_mu,
                         const AgentPiece& piece, double gamma) {
  RsddAgentState next = rsdd_local_solve(s, lambda_in, piece);
  for (auto& [j, lam] : next.lambda_out) {
    const auto it = neighbor_mu.find(j);
    if (it == neighbor_mu.end())
      throw std::invalid_argument("rsdd_step: missing multiplier from neighbor " + std::to_string(j));
    lam -= gamma * (next.mu - it->second);
  }
  return next;
}

DualRunResult run_rsdd(const ConstraintCoupledProblem& prob,
                       const CommGraph& graph, const RsddRunOptions& opt) {
  if (graph.directed()) throw std::invalid_argument("run_rsdd: undirected graph required");
  const int N = prob.n_agents();
  const int S = prob.S;
  double M = opt.M;
  if (M <= 0.0) {
    if (opt.reference.multipliers.size() != S)
      throw std::invalid_argument("run_rsdd: no penalty constant and no reference multipliers to derive one");
    M = 10.0 * opt.reference.multipliers.lpNorm<1>();
  }
  std::vector<RsddAgentState> st(N);
  for (int i = 0; i < N; ++i) {
    st[i].M = M;
    st[i].mu = Eigen::VectorXd::Zero(S);
    st[i].x = Eigen::VectorXd::Zero(prob.agents[i].d + prob.agents[i].n_aux);
    for (int j : graph.neighbors(i)) st[i].lambda_out[j] = Eigen::VectorXd::Zero(S);
  }

  DualRunResult out;
  out.trace.oracle_hash = report_hash(opt.reference);
  out.trace.columns = {"t", "cost_error", "max_coupling_violation", "sum_rho",
                       "rsdd_tracking"};

  for (long t = 0; t < opt.rounds; ++t) {
    const double gamma = opt.schedule.at(t + 1);
    std::vector<RsddAgentState> solved(N);
    for (int i = 0; i < N; ++i) {
      std::map<int, Eigen::VectorXd> lam_in;
      for (int j : graph.neighbors(i)) lam_in[j] = st[j].lambda_out.at(i);
      solved[i] = rsdd_local_solve(st[i], lam_in, prob.agents[i]);
    }
    for (int i = 0; i < N; ++i) {
      for (auto& [j, lam] : solved[i].lambda_out)
        lam -= gamma * (solved[i].mu - solved[j].mu);
    }
    st = std::move(solved);

    double cost = 0.0, sum_rho = 0.0;
    Eigen::VectorXd gsum = Eigen::VectorXd::Zero(S);
    std::vector<Eigen::VectorXd> gs(N);
    for (int i = 0; i < N; ++i) {
      cost += prob.agents[i].f.value(st[i].x.head(prob.agents[i].d)) + M * st[i].rho_i;
      sum_rho += st[i].rho_i;
      gs[i] = prob.agents[i].g(st[i].x);
      gsum += gs[i];
    }
    double tracking = 0.0;
    for (int i = 0; i < N; ++i) {
      std::map<int, Eigen::VectorXd> lam_in;
      for (int j : graph.neighbors(i)) lam_in[j] = st[j].lambda_out.at(i);
      const Eigen::VectorXd delta = lambda_imbalance(st[i].lambda_out, lam_in, S);
      tracking = std::max(tracking, (gsum - gs[i] - delta).cwiseAbs().maxCoeff());
    }
    out.trace.add_row({static_cast<double>(t + 1), std::abs(cost - opt.reference.value),
                       gsum.maxCoeff(), sum_rho, tracking});
    if (opt.observer) opt.observer(t + 1, st);
  }
  out.rsdd = std::move(st);
  return out;
}

// ---------------------------------------------------------------------------
// Master-coordinated baselines
// ---------------------------------------------------------------------------

ParallelDualState parallel_ddec_round(const ParallelDualState& s,
                                      const std::vector<FunctionOracle>& f,
                                      const SetOracle& X, double gamma) {
  const int N = static_cast<int>(f.size());
  ParallelDualState next;
  next.lambda.resize(N);
  next.x.resize(N);
  for (int i = 0; i < N; ++i) {
    SolveReport rep = regularized_argmin(f[i], X, s.lambda[i], {}, 0.0);
    check_solved(rep, "parallel ddec");
    next.x[i] = rep.x;
  }
  // Ascend, then project back onto {sum_i lambda_i = 0} (mean subtraction).
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(f[0].dim);
  for (int i = 0; i < N; ++i) mean += s.lambda[i] + gamma * next.x[i];
  mean /= N;
  for (int i = 0; i < N; ++i) next.lambda[i] = s.lambda[i] + gamma * next.x[i] - mean;
  return next;
}

ParallelAdmmState parallel_admm_round(const ParallelAdmmState& s,
                                      const std::vector<FunctionOracle>& f,
                                      const SetOracle& X) {
  const int N = static_cast<int>(f.size());
  ParallelAdmmState next = s;
  for (int i = 0; i < N; ++i) {
    SolveReport rep = regularized_argmin(f[i], X, s.lambda[i], {{1.0, s.z}}, s.rho);
    check_solved(rep, "parallel admm");
    next.x[i] = rep.x;
  }
  Eigen::VectorXd xbar = Eigen::VectorXd::Zero(f[0].dim);
  Eigen::VectorXd lbar = Eigen::VectorXd::Zero(f[0].dim);
  for (int i = 0; i < N; ++i) {
    xbar += next.x[i];
    lbar += s.lambda[i];
  }
  next.z = xbar / N + lbar / (N * s.rho);
  for (int i = 0; i < N; ++i) next.lambda[i] = s.lambda[i] + s.rho * (next.x[i] - next.z);
  return next;
}

}  // namespace dopt
