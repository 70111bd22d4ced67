#include "dopt/cexchange.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <set>
#include <stdexcept>

namespace dopt {

namespace {

void put_bytes(std::string* out, const void* data, size_t len) {
  out->append(static_cast<const char*>(data), len);
}

void put_i32(std::string* out, int v) { put_bytes(out, &v, 4); }

void put_f64(std::string* out, double v) { put_bytes(out, &v, 8); }

void put_matrix(std::string* out, const Eigen::MatrixXd& m) {
  put_i32(out, static_cast<int>(m.rows()));
  put_i32(out, static_cast<int>(m.cols()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
}

std::string descriptor_key(const ConstraintDescriptor& d) {
  std::string s;
  s.push_back(static_cast<char>(d.kind));
  put_i32(&s, d.origin);
  put_matrix(&s, d.A);
  put_matrix(&s, d.b);
  put_matrix(&s, d.center);
  put_f64(&s, d.radius);
  return s;
}

}  // namespace

std::string ExchBasis::serialize() const {
  // Little-endian byte layout: mode tag, then per-payload (origin, numeric
  // fields); doubles are raw IEEE-754 bytes.
  std::string s;
  s.push_back(lp_mode ? 'L' : 'C');
  if (lp_mode) {
    put_i32(&s, static_cast<int>(rhs.size()));
    for (int r = 0; r < rhs.size(); ++r) {
      put_i32(&s, origins.empty() ? -1 : origins[r]);
      for (int c = 0; c < rows.cols(); ++c) put_f64(&s, rows(r, c));
      put_f64(&s, rhs(r));
    }
  } else {
    put_i32(&s, static_cast<int>(descriptors.size()));
    for (const auto& d : descriptors) s += descriptor_key(d);
  }
  return s;
}

int halting_threshold(const GraphSchedule& sched) {
  if (sched.period && *sched.period == 1)
    return 2 * graph_diameter(sched.at(0)) + 1;
  if (!sched.window)
    throw std::invalid_argument("halting_threshold: time-varying schedule needs a declared connectivity window T");
  return 2 * sched.n * (*sched.window) + 1;
}

CCAgentState cc_lp_step(const CCAgentState& s,
                        const std::vector<const ExchBasis*>& neighbor_bases,
                        const Eigen::VectorXd& c) {
  const int d = static_cast<int>(c.size());
  // Aggregate own row, own basis, neighbor bases; box rows are re-imposed
  // by the solver, so box-origin payloads are skipped. Exact duplicates
  // collapse.
  std::vector<Eigen::RowVectorXd> rows = {s.own_row};
  std::vector<double> rhs = {s.own_rhs};
  std::vector<int> origins = {s.id};
  auto add_basis = [&](const ExchBasis& b) {
    for (int r = 0; r < b.rhs.size(); ++r) {
      if (!b.origins.empty() && b.origins[r] == -1) continue;  // box row
      bool dup = false;
      for (size_t k = 0; k < rows.size(); ++k)
        if (rhs[k] == b.rhs(r) && rows[k] == b.rows.row(r)) {
          dup = true;
          break;
        }
      if (!dup) {
        rows.push_back(b.rows.row(r));
        rhs.push_back(b.rhs(r));
        origins.push_back(b.origins.empty() ? -1 : b.origins[r]);
      }
    }
  };
  add_basis(s.basis);
  for (const auto* nb : neighbor_bases) add_basis(*nb);

  Eigen::MatrixXd A(rows.size(), d);
  Eigen::VectorXd b(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    A.row(r) = rows[r];
    b(r) = rhs[r];
  }
  const LexLpResult res = lex_lp_solve(c, A, b, s.M);
  CCAgentState next = s;
  if (res.report.status == SolveStatus::Infeasible) {
    next.infeasible = true;
    return next;
  }
  if (res.report.status != SolveStatus::Optimal)
    throw std::runtime_error("cc_lp_step: local lex solve returned " + to_string(res.report.status));
  next.x = res.report.x;
  next.basis.lp_mode = true;
  next.basis.rows = res.basis.P;
  next.basis.rhs = res.basis.q;
  next.basis.origins.clear();
  for (size_t r = 0; r < res.basis.rows.size(); ++r) {
    next.basis.origins.push_back(res.basis.from_box[r] ? -1
                                                       : origins[res.basis.rows[r]]);
  }
  next.infeasible = false;
  return next;
}

CCAgentState cc_convex_step(const CCAgentState& s,
                            const std::vector<const ExchBasis*>& neighbor_bases,
                            const Eigen::VectorXd& c,
                            const Eigen::MatrixXd& cost_P, int delta) {
  // Aggregate descriptors, deduplicated by payload.
  std::vector<const ConstraintDescriptor*> sets;
  std::set<std::string> seen;
  auto add = [&](const ConstraintDescriptor& desc) {
    const std::string key = descriptor_key(desc);
    if (seen.insert(key).second) sets.push_back(&desc);
  };
  for (const auto& desc : s.own_descriptors) add(desc);
  for (const auto& desc : s.basis.descriptors) add(desc);
  for (const auto* nb : neighbor_bases)
    for (const auto& desc : nb->descriptors) add(desc);

  const SolveReport rep = lex_solve_descriptors(sets, c, cost_P, s.M);
  CCAgentState next = s;
  if (rep.status == SolveStatus::Infeasible) {
    next.infeasible = true;
    return next;
  }
  if (rep.status != SolveStatus::Optimal)
    throw std::runtime_error("cc_convex_step: local lex solve returned " + to_string(rep.status));

  const bool unchanged =
      s.x.size() == rep.x.size() &&
      (s.x - rep.x).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + rep.x.cwiseAbs().maxCoeff());
  next.x = rep.x;
  next.infeasible = false;
  if (unchanged && !s.basis.descriptors.empty()) {
    // The solution is a fixed point and the previous basis still certifies
    // it; skip the extraction re-solves.
    return next;
  }
  const std::vector<int> keep =
      extract_descriptor_basis(sets, c, cost_P, s.M, rep.x, delta);
  next.basis.lp_mode = false;
  next.basis.descriptors.clear();
  for (int idx : keep) next.basis.descriptors.push_back(*sets[idx]);
  return next;
}

namespace {

double pooled_cost(const Eigen::VectorXd& c, const Eigen::MatrixXd& P,
                   const Eigen::VectorXd& x) {
  double v = c.dot(x);
  if (P.size() > 0) v += 0.5 * x.dot(P * x);
  return v;
}

}  // namespace

CCRunResult run_cc_lp(const CCLinearProgram& lp, const GraphSchedule& sched,
                      const CCRunOptions& opt) {
  const int N = static_cast<int>(lp.b.size());
  if (sched.n != N)
    throw std::invalid_argument("run_cc_lp: schedule agent count must match the row count");
  const int threshold = halting_threshold(sched);

  std::vector<CCAgentState> st(N);
  std::vector<HaltState> halt(N);
  for (int i = 0; i < N; ++i) {
    st[i].own_row = lp.A.row(i);
    st[i].own_rhs = lp.b(i);
    st[i].id = i;
    st[i].M = lp.M;
    halt[i].threshold = threshold;
    // Initialization: the basis is the agent's own constraint row; the
    // first estimate solves it against the box alone.
    st[i].basis.lp_mode = true;
    st[i].basis.rows = lp.A.row(i);
    st[i].basis.rhs = Eigen::VectorXd::Constant(1, lp.b(i));
    st[i].basis.origins = {i};
    const LexLpResult init = lex_lp_solve(lp.c, lp.A.row(i), st[i].basis.rhs, lp.M);
    if (init.report.status != SolveStatus::Optimal)
      throw std::runtime_error("run_cc_lp: initialization solve failed");
    st[i].x = init.report.x;
  }

  CCRunResult out;
  out.trace.oracle_hash = report_hash(opt.reference);
  out.trace.columns = {"t", "cost_min", "cost_max", "max_violation",
                       "max_dist_to_ref"};

  for (long t = 0; t < opt.max_rounds; ++t) {
    const CommGraph g = sched.at(static_cast<int>(t));
    std::vector<CCAgentState> next = st;
    for (int i = 0; i < N; ++i) {
      if (halt[i].stable_rounds >= threshold) continue;
      std::vector<const ExchBasis*> bases;
      for (int j : g.in_neighbors(i)) bases.push_back(&st[j].basis);
      next[i] = cc_lp_step(st[i], bases, lp.c);
      if (next[i].infeasible) {
        out.infeasible = true;
        out.agents = std::move(next);
        out.rounds = t + 1;
        return out;
      }
      const bool changed =
          (next[i].x - st[i].x).cwiseAbs().maxCoeff() > 1e-9;
      halt[i].update(changed);
    }
    st = std::move(next);

    double cmin = std::numeric_limits<double>::infinity();
    double cmax = -cmin, viol = -cmin, dist = 0.0;
    for (int i = 0; i < N; ++i) {
      const double cost = lp.c.dot(st[i].x);
      cmin = std::min(cmin, cost);
      cmax = std::max(cmax, cost);
      viol = std::max(viol, (lp.A * st[i].x - lp.b).maxCoeff());
      if (opt.reference.x.size() == st[i].x.size())
        dist = std::max(dist, (st[i].x - opt.reference.x).cwiseAbs().maxCoeff());
    }
    out.trace.add_row({static_cast<double>(t + 1), cmin, cmax, viol, dist});
    if (opt.observer) opt.observer(t + 1, st);

    bool all = true;
    for (int i = 0; i < N; ++i) all = all && halt[i].stable_rounds >= threshold;
    if (all) {
      out.all_halted = true;
      out.rounds = t + 1;
      out.agents = std::move(st);
      return out;
    }
  }
  out.rounds = opt.max_rounds;
  out.agents = std::move(st);
  return out;
}

CCRunResult run_cc_convex(const CommonCostProblem& prob,
                          const GraphSchedule& sched, const CCRunOptions& opt) {
  const int N = prob.n_agents();
  if (sched.n != N)
    throw std::invalid_argument("run_cc_convex: schedule agent count must match the problem");
  const int threshold = halting_threshold(sched);
  const int delta = prob.d + 1;

  std::vector<CCAgentState> st(N);
  std::vector<HaltState> halt(N);
  for (int i = 0; i < N; ++i) {
    st[i].own_descriptors = prob.agent_sets[i];
    st[i].id = i;
    st[i].M = prob.box_radius;
    st[i].basis.lp_mode = false;
    st[i].basis.descriptors = prob.agent_sets[i];
    halt[i].threshold = threshold;
    std::vector<const ConstraintDescriptor*> own;
    for (const auto& desc : st[i].own_descriptors) own.push_back(&desc);
    const SolveReport init = lex_solve_descriptors(own, prob.c, prob.cost_P, prob.box_radius);
    if (init.status != SolveStatus::Optimal)
      throw std::runtime_error("run_cc_convex: initialization solve failed");
    st[i].x = init.x;
  }

  std::vector<const ConstraintDescriptor*> pooled;
  for (const auto& group : prob.agent_sets)
    for (const auto& desc : group) pooled.push_back(&desc);

  CCRunResult out;
  out.trace.oracle_hash = report_hash(opt.reference);
  out.trace.columns = {"t", "cost_min", "cost_max", "max_violation",
                       "max_dist_to_ref"};

  for (long t = 0; t < opt.max_rounds; ++t) {
    const CommGraph g = sched.at(static_cast<int>(t));
    std::vector<CCAgentState> next = st;
    for (int i = 0; i < N; ++i) {
      if (halt[i].stable_rounds >= threshold) continue;
      std::vector<const ExchBasis*> bases;
      for (int j : g.in_neighbors(i)) bases.push_back(&st[j].basis);
      next[i] = cc_convex_step(st[i], bases, prob.c, prob.cost_P, delta);
      if (next[i].infeasible) {
        out.infeasible = true;
        out.agents = std::move(next);
        out.rounds = t + 1;
        return out;
      }
      const bool changed =
          (next[i].x - st[i].x).cwiseAbs().maxCoeff() > 1e-9;
      halt[i].update(changed);
    }
    st = std::move(next);

    double cmin = std::numeric_limits<double>::infinity();
    double cmax = -cmin, viol = -cmin, dist = 0.0;
    for (int i = 0; i < N; ++i) {
      const double cost = pooled_cost(prob.c, prob.cost_P, st[i].x);
      cmin = std::min(cmin, cost);
      cmax = std::max(cmax, cost);
      for (const auto* desc : pooled) {
        if (desc->is_disk())
          viol = std::max(viol, (st[i].x - desc->center).norm() - desc->radius);
        else if (desc->b.size() > 0)
          viol = std::max(viol, (desc->A * st[i].x - desc->b).maxCoeff());
      }
      if (opt.reference.x.size() == st[i].x.size())
        dist = std::max(dist, (st[i].x - opt.reference.x).cwiseAbs().maxCoeff());
    }
    out.trace.add_row({static_cast<double>(t + 1), cmin, cmax, viol, dist});
    if (opt.observer) opt.observer(t + 1, st);

    bool all = true;
    for (int i = 0; i < N; ++i) all = all && halt[i].stable_rounds >= threshold;
    if (all) {
      out.all_halted = true;
      out.rounds = t + 1;
      out.agents = std::move(st);
      return out;
    }
  }
  out.rounds = opt.max_rounds;
  out.agents = std::move(st);
  return out;
}

}  // namespace dopt
