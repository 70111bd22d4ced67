#include "dopt/problems.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dopt/lexlp.hpp"
#include "dopt/rng.hpp"

namespace dopt {

namespace {

// Numerically stable log(1 + exp(a)).
double log1pexp(double a) {
  return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a)));
}

double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

Eigen::MatrixXd gaussian_matrix(Rng& rng, int rows, int cols, double stddev) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.normal(0.0, stddev);
  return m;
}

Eigen::MatrixXd random_orthogonal(Rng& rng, int d) {
  const Eigen::MatrixXd g = gaussian_matrix(rng, d, d, 1.0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd u = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the sign ambiguity of the factorization for determinism.
  for (int i = 0; i < d; ++i)
    if (r(i, i) < 0.0) u.col(i) = -u.col(i);
  return u;
}

}  // namespace

CostCoupledProblem make_lasso(int N, int n_i, int d, double rho,
                              std::uint64_t seed) {
  if (rho < 0.0) throw std::invalid_argument("make_lasso: rho must be >= 0");
  Rng rng(seed);
  CostCoupledProblem prob;
  prob.d = d;
  prob.family = "lasso";
  prob.seed = seed;
  prob.lasso_rho = rho;
  prob.constraint = SetOracle::unconstrained();
  const double l1w = rho / N;

  for (int i = 0; i < N; ++i) {
    Eigen::MatrixXd D = gaussian_matrix(rng, n_i, d, 1.0);
    Eigen::VectorXd b(n_i);
    for (int r = 0; r < n_i; ++r) b(r) = rng.normal();
    prob.lasso_D.push_back(D);
    prob.lasso_b.push_back(b);

    FunctionOracle f;
    f.dim = d;
    f.smooth = (rho == 0.0);
    const Eigen::MatrixXd DtD = D.transpose() * D;
    f.lipschitz = 2.0 * DtD.selfadjointView<Eigen::Lower>()
                            .eigenvalues()
                            .maxCoeff();
    f.value = [D, b, l1w](const Eigen::VectorXd& x) {
      return (D * x - b).squaredNorm() + l1w * x.lpNorm<1>();
    };
    f.subgradient = [D, b, l1w](const Eigen::VectorXd& x) {
      Eigen::VectorXd g = 2.0 * D.transpose() * (D * x - b);
      for (int k = 0; k < x.size(); ++k)
        g(k) += l1w * ((x(k) > 0.0) ? 1.0 : (x(k) < 0.0 ? -1.0 : 0.0));
      return g;
    };
    if (rho == 0.0) {
      f.has_quadratic = true;
      f.P = 2.0 * DtD;
      f.q = -2.0 * D.transpose() * b;
      f.c0 = b.squaredNorm();
    }
    // Epigraph model over (x, u): u_k >= |x_k|.
    ArgminModel am;
    am.n_aux = d;
    am.model.P = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    am.model.P.topLeftCorner(d, d) = 2.0 * DtD;
    am.model.q = Eigen::VectorXd::Zero(2 * d);
    am.model.q.head(d) = -2.0 * D.transpose() * b;
    am.model.q.tail(d).setConstant(l1w);
    am.model.c0 = b.squaredNorm();
    am.model.A = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    am.model.A.topLeftCorner(d, d) = Eigen::MatrixXd::Identity(d, d);
    am.model.A.topRightCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
    am.model.A.bottomLeftCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
    am.model.A.bottomRightCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
    am.model.b = Eigen::VectorXd::Zero(2 * d);
    f.argmin_model = am;
    prob.agents.push_back(std::move(f));
  }
  return prob;
}

CostCoupledProblem make_logistic(int N, int m_i, int d, double C,
                                 std::uint64_t seed) {
  if (C <= 0.0) throw std::invalid_argument("make_logistic: C must be > 0");
  Rng rng(seed);
  CostCoupledProblem prob;
  prob.d = d + 1;  // (w, b)
  prob.family = "logistic";
  prob.seed = seed;
  prob.logistic_C = C;
  prob.constraint = SetOracle::unconstrained();
  prob.data_points.resize(N * m_i, d);
  prob.labels.resize(N * m_i);
  const double ridge = C / N;

  for (int i = 0; i < N; ++i) {
    Eigen::MatrixXd P(m_i, d);
    Eigen::VectorXd L(m_i);
    for (int j = 0; j < m_i; ++j) {
      for (int k = 0; k < d; ++k) P(j, k) = rng.normal(0.0, std::sqrt(2.0));
      L(j) = rng.bernoulli(0.5) ? 1.0 : -1.0;
      prob.data_points.row(i * m_i + j) = P.row(j);
      prob.labels(i * m_i + j) = L(j);
      prob.agent_of_sample.push_back(i);
    }

    FunctionOracle f;
    f.dim = d + 1;
    f.smooth = true;
    double lsum = 0.0;
    for (int j = 0; j < m_i; ++j)
      lsum += 0.25 * (P.row(j).squaredNorm() + 1.0);
    f.lipschitz = lsum + ridge;
    f.strong_convexity = ridge;  // in the w block only
    f.value = [P, L, ridge, d](const Eigen::VectorXd& wb) {
      double v = 0.5 * ridge * wb.head(d).squaredNorm();
      for (int j = 0; j < L.size(); ++j)
        v += log1pexp(-(P.row(j).dot(wb.head(d)) + wb(d)) * L(j));
      return v;
    };
    f.subgradient = [P, L, ridge, d](const Eigen::VectorXd& wb) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(d + 1);
      g.head(d) = ridge * wb.head(d);
      for (int j = 0; j < L.size(); ++j) {
        const double z = P.row(j).dot(wb.head(d)) + wb(d);
        const double w = -L(j) * sigmoid(-L(j) * z);
        g.head(d) += w * P.row(j).transpose();
        g(d) += w;
      }
      return g;
    };
    prob.agents.push_back(std::move(f));
  }
  return prob;
}

CommonCostProblem make_soft_svm(int N, int d, const SoftSvmOptions& opt,
                                std::uint64_t seed) {
  if (N < 2) throw std::invalid_argument("make_soft_svm: need N >= 2");
  Rng rng(seed);
  CommonCostProblem prob;
  const int dim = d + 1 + N;  // (w, b, xi)
  prob.d = dim;
  prob.family = "svm";
  prob.seed = seed;
  prob.box_radius = opt.box_radius;
  prob.cost_P = Eigen::MatrixXd::Zero(dim, dim);
  prob.cost_P.topLeftCorner(d, d) = Eigen::MatrixXd::Identity(d, d);
  prob.c = Eigen::VectorXd::Zero(dim);
  prob.c.tail(N).setConstant(opt.C);

  Eigen::VectorXd mean_pos = opt.mean_pos;
  if (mean_pos.size() == 0) mean_pos = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd mean_neg = opt.mean_neg;
  if (mean_neg.size() == 0) {
    mean_neg = Eigen::VectorXd::Zero(d);
    if (d >= 1) mean_neg(0) = 3.0;
    if (d >= 2) mean_neg(1) = 2.0;
  }

  const int n_pos = (N + 1) / 2;
  for (int i = 0; i < N; ++i) {
    const double label = (i < n_pos) ? 1.0 : -1.0;
    const Eigen::VectorXd& mean = (i < n_pos) ? mean_pos : mean_neg;
    Eigen::VectorXd p(d);
    for (int k = 0; k < d; ++k) p(k) = mean(k) + rng.normal();

    ConstraintDescriptor desc;
    desc.kind = ConstraintDescriptor::Kind::SvmSample;
    desc.origin = i;
    desc.sample = p;
    desc.label = label;
    // l (w'p + b) >= 1 - xi  and  xi >= 0, as rows over (w, b, xi).
    desc.A = Eigen::MatrixXd::Zero(2, dim);
    desc.b = Eigen::VectorXd::Zero(2);
    desc.A.block(0, 0, 1, d) = -label * p.transpose();
    desc.A(0, d) = -label;
    desc.A(0, d + 1 + i) = -1.0;
    desc.b(0) = -1.0;
    desc.A(1, d + 1 + i) = -1.0;
    prob.agent_sets.push_back({desc});
  }
  return prob;
}

ConstraintCoupledProblem make_task_assignment(
    const std::vector<std::vector<int>>& allowed, const Eigen::MatrixXd& costs,
    std::uint64_t seed) {
  const int N = static_cast<int>(costs.rows());
  if (costs.cols() != N || static_cast<int>(allowed.size()) != N)
    throw std::invalid_argument("make_task_assignment: square cost matrix and one allowed-list per agent required");

  ConstraintCoupledProblem prob;
  prob.S = 2 * N;
  prob.family = "assignment";
  prob.seed = seed;

  for (int i = 0; i < N; ++i) {
    AgentPiece a;
    a.d = N;
    a.n_aux = 0;
    a.local.q = costs.row(i).transpose();
    a.local.A = Eigen::MatrixXd::Zero(2 * N, N);
    a.local.A.topRows(N) = Eigen::MatrixXd::Identity(N, N);
    a.local.A.bottomRows(N) = -Eigen::MatrixXd::Identity(N, N);
    a.local.b = Eigen::VectorXd::Zero(2 * N);
    a.local.b.head(N).setOnes();
    // 1'x = 1 plus x_k = 0 for disallowed tasks.
    std::vector<int> banned;
    std::vector<bool> ok(N, false);
    for (int k : allowed[i]) {
      if (k < 0 || k >= N) throw std::invalid_argument("make_task_assignment: task index out of range");
      ok[k] = true;
    }
    for (int k = 0; k < N; ++k)
      if (!ok[k]) banned.push_back(k);
    a.local.E = Eigen::MatrixXd::Zero(1 + banned.size(), N);
    a.local.f = Eigen::VectorXd::Zero(1 + banned.size());
    a.local.E.row(0).setOnes();
    a.local.f(0) = 1.0;
    for (size_t r = 0; r < banned.size(); ++r) a.local.E(1 + r, banned[r]) = 1.0;
    // Coupling sum_i x_i = 1 as paired inequalities.
    a.G = Eigen::MatrixXd::Zero(2 * N, N);
    a.G.topRows(N) = Eigen::MatrixXd::Identity(N, N);
    a.G.bottomRows(N) = -Eigen::MatrixXd::Identity(N, N);
    a.h = Eigen::VectorXd::Zero(2 * N);
    a.h.head(N).setConstant(-1.0 / N);
    a.h.tail(N).setConstant(1.0 / N);
    a.bound_radius = std::sqrt(static_cast<double>(N));
    FunctionOracle f;
    f.dim = N;
    f.smooth = true;
    f.lipschitz = 0.0;
    const Eigen::VectorXd ci = costs.row(i).transpose();
    f.value = [ci](const Eigen::VectorXd& x) { return ci.dot(x); };
    f.subgradient = [ci](const Eigen::VectorXd&) { return ci; };
    f.has_quadratic = true;
    f.P = Eigen::MatrixXd::Zero(N, N);
    f.q = ci;
    a.f = std::move(f);
    prob.agents.push_back(std::move(a));
  }

  // A perfect matching over the allowed pairs exists iff the stacked LP
  // relaxation is feasible (the assignment polytope is integral).
  int total_rows = 0, total_vars = N * N;
  for (const auto& a : prob.agents)
    total_rows += static_cast<int>(a.local.b.size()) + 2 * static_cast<int>(a.local.f.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(total_rows + 2 * N, total_vars);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(total_rows + 2 * N);
  int row = 0;
  for (int i = 0; i < N; ++i) {
    const auto& L = prob.agents[i].local;
    const int k = static_cast<int>(L.b.size());
    A.block(row, i * N, k, N) = L.A;
    b.segment(row, k) = L.b;
    row += k;
    const int ke = static_cast<int>(L.f.size());
    A.block(row, i * N, ke, N) = L.E;
    b.segment(row, ke) = L.f;
    A.block(row + ke, i * N, ke, N) = -L.E;
    b.segment(row + ke, ke) = -L.f;
    row += 2 * ke;
  }
  for (int i = 0; i < N; ++i) {
    A.block(row, i * N, N, N) = Eigen::MatrixXd::Identity(N, N);
    A.block(row + N, i * N, N, N) = -Eigen::MatrixXd::Identity(N, N);
  }
  b.segment(row, N).setOnes();
  b.segment(row + N, N).setConstant(-1.0);
  const SolveReport feas = lp_solve(Eigen::VectorXd::Zero(total_vars), A, b);
  if (feas.status == SolveStatus::Infeasible)
    throw std::invalid_argument("make_task_assignment: no perfect matching over the allowed pairs");
  return prob;
}

ConstraintCoupledProblem make_microgrid(int n_gen, int n_stor, int n_conl,
                                        const MicrogridOptions& opt,
                                        std::uint64_t seed) {
  const int S = opt.horizon;
  const int T = S + 1;  // slots 0..S
  if (opt.gen_p_lo > opt.gen_p_hi || opt.gen_r_lo > opt.gen_r_hi ||
      opt.stor_dis < 0.0 || opt.stor_ch < 0.0 || opt.stor_q_max < 0.0 ||
      opt.conl_P < 0.0 || opt.tr_E < 0.0)
    throw std::invalid_argument("make_microgrid: inconsistent bounds");
  Rng rng(seed);

  Eigen::VectorXd demand = opt.demand;
  if (demand.size() == 0) {
    demand.resize(T);
    for (int s = 0; s < T; ++s)
      demand(s) = 0.003 + 0.0005 * std::sin(M_PI * s / 6.0);
  } else if (demand.size() != T) {
    throw std::invalid_argument("make_microgrid: demand length must equal horizon+1");
  }

  ConstraintCoupledProblem prob;
  prob.S = T;
  prob.family = "microgrid";
  prob.seed = seed;
  const int n_agents = n_gen + n_stor + n_conl + 1;

  auto coupling = [&](int total_dim) {
    // g_i^s = -p_i^s + D^s / n_agents; auxiliaries do not enter.
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(T, total_dim);
    G.topLeftCorner(T, T) = -Eigen::MatrixXd::Identity(T, T);
    return G;
  };
  const Eigen::VectorXd h = demand / n_agents;

  for (int g = 0; g < n_gen; ++g) {
    const double a1 = opt.gen_a1 * (0.9 + 0.2 * rng.uniform());
    const double a2 = opt.gen_a2 * (0.9 + 0.2 * rng.uniform());
    AgentPiece a;
    a.d = T;
    a.n_aux = 0;
    a.local.P = 2.0 * a2 * Eigen::MatrixXd::Identity(T, T);
    a.local.q = a1 * Eigen::VectorXd::Ones(T);
    a.local.A = Eigen::MatrixXd::Zero(2 * T + 2 * S, T);
    a.local.b = Eigen::VectorXd::Zero(2 * T + 2 * S);
    a.local.A.topRows(T) = Eigen::MatrixXd::Identity(T, T);
    a.local.b.head(T).setConstant(opt.gen_p_hi);
    a.local.A.middleRows(T, T) = -Eigen::MatrixXd::Identity(T, T);
    a.local.b.segment(T, T).setConstant(-opt.gen_p_lo);
    for (int s = 0; s < S; ++s) {
      a.local.A(2 * T + s, s + 1) = 1.0;   // ramp up
      a.local.A(2 * T + s, s) = -1.0;
      a.local.b(2 * T + s) = opt.gen_r_hi;
      a.local.A(2 * T + S + s, s + 1) = -1.0;  // ramp down
      a.local.A(2 * T + S + s, s) = 1.0;
      a.local.b(2 * T + S + s) = -opt.gen_r_lo;
    }
    a.G = coupling(T);
    a.h = h;
    a.bound_radius = std::sqrt(T) * std::max(std::abs(opt.gen_p_lo), std::abs(opt.gen_p_hi));
    FunctionOracle f;
    f.dim = T;
    f.smooth = true;
    f.lipschitz = 2.0 * a2;
    f.strong_convexity = 2.0 * a2;
    f.has_quadratic = true;
    f.P = a.local.P;
    f.q = a.local.q;
    f.value = [a1, a2](const Eigen::VectorXd& p) {
      return a1 * p.sum() + a2 * p.squaredNorm();
    };
    f.subgradient = [a1, a2](const Eigen::VectorXd& p) {
      return (a1 + 2.0 * a2 * p.array()).matrix().eval();
    };
    a.f = std::move(f);
    prob.agents.push_back(std::move(a));
  }

  for (int st = 0; st < n_stor; ++st) {
    AgentPiece a;
    a.d = T;
    a.n_aux = 0;
    a.local.q = Eigen::VectorXd::Zero(T);
    // Rate bounds plus charge-level windows on the running sums.
    a.local.A = Eigen::MatrixXd::Zero(4 * T, T);
    a.local.b = Eigen::VectorXd::Zero(4 * T);
    a.local.A.topRows(T) = Eigen::MatrixXd::Identity(T, T);
    a.local.b.head(T).setConstant(opt.stor_ch);
    a.local.A.middleRows(T, T) = -Eigen::MatrixXd::Identity(T, T);
    a.local.b.segment(T, T).setConstant(opt.stor_dis);
    for (int s = 0; s < T; ++s) {
      for (int tau = 0; tau <= s; ++tau) {
        a.local.A(2 * T + s, tau) = 1.0;
        a.local.A(3 * T + s, tau) = -1.0;
      }
      a.local.b(2 * T + s) = opt.stor_q_max - opt.stor_q0;
      a.local.b(3 * T + s) = opt.stor_q0;
    }
    a.G = coupling(T);
    a.h = h;
    a.bound_radius = std::sqrt(T) * std::max(opt.stor_ch, opt.stor_dis);
    FunctionOracle f;
    f.dim = T;
    f.smooth = true;
    f.lipschitz = 0.0;
    f.has_quadratic = true;
    f.P = Eigen::MatrixXd::Zero(T, T);
    f.q = Eigen::VectorXd::Zero(T);
    f.value = [](const Eigen::VectorXd&) { return 0.0; };
    f.subgradient = [T](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(T).eval(); };
    a.f = std::move(f);
    prob.agents.push_back(std::move(a));
  }

  for (int cl = 0; cl < n_conl; ++cl) {
    // Decision p plus epigraph auxiliaries v_s >= beta*(p_des - p_s), v >= 0.
    AgentPiece a;
    a.d = T;
    a.n_aux = T;
    const int dim = 2 * T;
    const double beta = opt.conl_beta;
    const double p_des = opt.conl_p_des;
    const double v_cap = beta * (opt.conl_P + std::abs(p_des)) + 1.0;
    a.local.q = Eigen::VectorXd::Zero(dim);
    a.local.q.tail(T).setOnes();
    a.local.A = Eigen::MatrixXd::Zero(5 * T, dim);
    a.local.b = Eigen::VectorXd::Zero(5 * T);
    a.local.A.block(0, 0, T, T) = Eigen::MatrixXd::Identity(T, T);
    a.local.b.head(T).setConstant(opt.conl_P);
    a.local.A.block(T, 0, T, T) = -Eigen::MatrixXd::Identity(T, T);
    a.local.b.segment(T, T).setConstant(opt.conl_P);
    a.local.A.block(2 * T, T, T, T) = -Eigen::MatrixXd::Identity(T, T);  // v >= 0
    a.local.A.block(3 * T, 0, T, T) = -beta * Eigen::MatrixXd::Identity(T, T);
    a.local.A.block(3 * T, T, T, T) = -Eigen::MatrixXd::Identity(T, T);
    a.local.b.segment(3 * T, T).setConstant(-beta * p_des);
    a.local.A.block(4 * T, T, T, T) = Eigen::MatrixXd::Identity(T, T);  // compactness cap
    a.local.b.segment(4 * T, T).setConstant(v_cap);
    a.G = coupling(dim);
    a.h = h;
    a.bound_radius = std::sqrt(T) * std::max(opt.conl_P, v_cap) * std::sqrt(2.0);
    FunctionOracle f;
    f.dim = T;
    f.smooth = false;
    f.value = [beta, p_des](const Eigen::VectorXd& p) {
      double v = 0.0;
      for (int s = 0; s < p.size(); ++s) v += beta * std::max(0.0, p_des - p(s));
      return v;
    };
    f.subgradient = [beta, p_des](const Eigen::VectorXd& p) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(p.size());
      // At the kink the subdifferential [-beta, 0] contains 0.
      for (int s = 0; s < p.size(); ++s)
        if (p(s) < p_des) g(s) = -beta;
      return g;
    };
    a.f = std::move(f);
    prob.agents.push_back(std::move(a));
  }

  {
    // Trade node: decision p plus epigraph auxiliaries u_s >= c2 |p_s|.
    AgentPiece a;
    a.d = T;
    a.n_aux = T;
    const int dim = 2 * T;
    const double c1 = opt.tr_c1, c2 = opt.tr_c2;
    const double u_cap = c2 * opt.tr_E + 1.0;
    a.local.q = Eigen::VectorXd::Zero(dim);
    a.local.q.head(T).setConstant(-c1);
    a.local.q.tail(T).setOnes();
    a.local.A = Eigen::MatrixXd::Zero(5 * T, dim);
    a.local.b = Eigen::VectorXd::Zero(5 * T);
    a.local.A.block(0, 0, T, T) = Eigen::MatrixXd::Identity(T, T);
    a.local.b.head(T).setConstant(opt.tr_E);
    a.local.A.block(T, 0, T, T) = -Eigen::MatrixXd::Identity(T, T);
    a.local.b.segment(T, T).setConstant(opt.tr_E);
    a.local.A.block(2 * T, 0, T, T) = c2 * Eigen::MatrixXd::Identity(T, T);
    a.local.A.block(2 * T, T, T, T) = -Eigen::MatrixXd::Identity(T, T);
    a.local.A.block(3 * T, 0, T, T) = -c2 * Eigen::MatrixXd::Identity(T, T);
    a.local.A.block(3 * T, T, T, T) = -Eigen::MatrixXd::Identity(T, T);
    a.local.A.block(4 * T, T, T, T) = Eigen::MatrixXd::Identity(T, T);  // compactness cap
    a.local.b.segment(4 * T, T).setConstant(u_cap);
    a.G = coupling(dim);
    a.h = h;
    a.bound_radius = std::sqrt(T) * std::max(opt.tr_E, u_cap) * std::sqrt(2.0);
    FunctionOracle f;
    f.dim = T;
    f.smooth = false;
    f.value = [c1, c2](const Eigen::VectorXd& p) {
      return -c1 * p.sum() + c2 * p.lpNorm<1>();
    };
    f.subgradient = [c1, c2](const Eigen::VectorXd& p) {
      Eigen::VectorXd g(p.size());
      for (int s = 0; s < p.size(); ++s) {
        if (p(s) > 0.0)
          g(s) = -c1 + c2;
        else if (p(s) < 0.0)
          g(s) = -c1 - c2;
        else
          g(s) = (std::abs(c1) <= c2) ? 0.0 : -c1 + c2;
      }
      return g;
    };
    a.f = std::move(f);
    prob.agents.push_back(std::move(a));
  }

  // Strict-feasibility margin LP: maximize m with all local constraints and
  // sum_i g_i(x_i) <= -m 1, m <= 1.
  {
    int vars = 1;  // m first
    std::vector<int> offset;
    for (const auto& a : prob.agents) {
      offset.push_back(vars);
      vars += a.d + a.n_aux;
    }
    int rows = 1 + T;
    for (const auto& a : prob.agents) rows += static_cast<int>(a.local.b.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, vars);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
    int row = 0;
    A(row, 0) = 1.0;
    b(row) = 1.0;  // m <= 1
    ++row;
    for (int s = 0; s < T; ++s) A.block(row + s, 0, 1, 1).setConstant(1.0);
    for (size_t i = 0; i < prob.agents.size(); ++i) {
      const auto& a = prob.agents[i];
      A.block(row, offset[i], T, a.d + a.n_aux) = a.G;
    }
    b.segment(row, T) = -demand;  // sum_i G_i x_i + m <= -sum h = -D
    row += T;
    for (size_t i = 0; i < prob.agents.size(); ++i) {
      const auto& a = prob.agents[i];
      const int k = static_cast<int>(a.local.b.size());
      A.block(row, offset[i], k, a.d + a.n_aux) = a.local.A;
      b.segment(row, k) = a.local.b;
      row += k;
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(vars);
    c(0) = -1.0;
    const SolveReport feas = lp_solve(c, A, b);
    if (feas.status != SolveStatus::Optimal || -feas.value <= 1e-6) {
      std::ostringstream msg;
      msg << "make_microgrid: demand infeasible for the device bounds"
          << " (max margin " << (feas.status == SolveStatus::Optimal ? -feas.value : 0.0) << ")";
      throw std::invalid_argument(msg.str());
    }
    for (size_t i = 0; i < prob.agents.size(); ++i) {
      const auto& a = prob.agents[i];
      prob.slater.push_back(feas.x.segment(offset[i], a.d + a.n_aux));
    }
  }
  return prob;
}

CommonCostProblem make_target_localization(const std::vector<SensorSpec>& sensors,
                                           int axis, bool positive,
                                           double box_radius) {
  if (axis != 0 && axis != 1)
    throw std::invalid_argument("make_target_localization: axis must be 0 or 1");
  CommonCostProblem prob;
  prob.d = 2;
  prob.family = "localization";
  prob.box_radius = box_radius;
  prob.c = Eigen::VectorXd::Zero(2);
  prob.c(axis) = positive ? 1.0 : -1.0;
  int id = 0;
  for (const auto& s : sensors) {
    ConstraintDescriptor desc;
    desc.origin = id++;
    switch (s.kind) {
      case SensorSpec::Kind::Disk:
        desc.kind = ConstraintDescriptor::Kind::Disk;
        desc.center = s.center;
        desc.radius = s.radius;
        break;
      case SensorSpec::Kind::Cone:
        desc.kind = ConstraintDescriptor::Kind::Cone;
        desc.A = s.rows;
        desc.b = s.rhs;
        break;
      case SensorSpec::Kind::Quadrant:
        desc.kind = ConstraintDescriptor::Kind::Halfspaces;
        desc.A = s.rows;
        desc.b = s.rhs;
        break;
    }
    prob.agent_sets.push_back({desc});
  }
  return prob;
}

CostCoupledProblem make_random_qp(int N, int d, double eig_lo, double eig_hi,
                                  std::uint64_t seed) {
  if (eig_lo <= 0.0 || eig_hi < eig_lo)
    throw std::invalid_argument("make_random_qp: need 0 < eig_lo <= eig_hi");
  Rng rng(seed);
  CostCoupledProblem prob;
  prob.d = d;
  prob.family = "qp";
  prob.seed = seed;
  prob.constraint = SetOracle::unconstrained();
  for (int i = 0; i < N; ++i) {
    const Eigen::MatrixXd U = random_orthogonal(rng, d);
    Eigen::VectorXd lam(d);
    for (int k = 0; k < d; ++k) lam(k) = rng.uniform(eig_lo, eig_hi);
    Eigen::MatrixXd Q = U * lam.asDiagonal() * U.transpose();
    Q = 0.5 * (Q + Q.transpose());  // kill round-off asymmetry
    Eigen::VectorXd r(d);
    for (int k = 0; k < d; ++k) r(k) = rng.normal();
    prob.qp_Q.push_back(Q);
    prob.qp_r.push_back(r);

    FunctionOracle f;
    f.dim = d;
    f.smooth = true;
    f.lipschitz = 2.0 * lam.maxCoeff();
    f.strong_convexity = 2.0 * lam.minCoeff();
    f.has_quadratic = true;
    f.P = 2.0 * Q;
    f.q = r;
    f.value = [Q, r](const Eigen::VectorXd& x) { return x.dot(Q * x) + r.dot(x); };
    f.subgradient = [Q, r](const Eigen::VectorXd& x) {
      return (2.0 * Q * x + r).eval();
    };
    ArgminModel am;
    am.n_aux = 0;
    am.model.P = f.P;
    am.model.q = f.q;
    f.argmin_model = am;
    prob.agents.push_back(std::move(f));
  }
  return prob;
}

void descriptor_rows(const ConstraintDescriptor& desc, Eigen::MatrixXd* A,
                     Eigen::VectorXd* b) {
  if (desc.is_disk())
    throw std::invalid_argument("descriptor_rows: disk has no finite row form");
  *A = desc.A;
  *b = desc.b;
}

bool descriptor_contains(const ConstraintDescriptor& desc,
                         const Eigen::VectorXd& x, double tol) {
  if (desc.is_disk())
    return (x - desc.center).norm() <= desc.radius + tol;
  return desc.A.rows() == 0 || ((desc.A * x - desc.b).maxCoeff() <= tol);
}

}  // namespace dopt
