#include "dopt/localsolve.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace dopt {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::Unbounded:
      return "unbounded";
    case SolveStatus::MaxIter:
      return "max_iter";
  }
  return "unknown";
}

std::uint64_t report_hash(const SolveReport& r) {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&h](const void* data, size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  if (r.x.size() > 0) feed(r.x.data(), sizeof(double) * r.x.size());
  feed(&r.value, sizeof(double));
  return h;
}

SetOracle SetOracle::box(int d, double radius) {
  SetOracle s;
  s.whole_space = false;
  s.bound_radius = radius * std::sqrt(static_cast<double>(d));
  s.contains = [radius](const Eigen::VectorXd& x) {
    return x.cwiseAbs().maxCoeff() <= radius + 1e-12;
  };
  s.project = [radius](const Eigen::VectorXd& x) {
    return x.cwiseMax(-radius).cwiseMin(radius).eval();
  };
  s.polyhedral = true;
  s.A = Eigen::MatrixXd::Zero(2 * d, d);
  s.A.topRows(d) = Eigen::MatrixXd::Identity(d, d);
  s.A.bottomRows(d) = -Eigen::MatrixXd::Identity(d, d);
  s.b = Eigen::VectorXd::Constant(2 * d, radius);
  return s;
}

SetOracle SetOracle::polyhedron(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                const Eigen::MatrixXd& E, const Eigen::VectorXd& f) {
  SetOracle s;
  s.whole_space = false;
  s.polyhedral = true;
  s.A = A;
  s.b = b;
  s.E = E;
  s.f = f;
  s.contains = [A, b, E, f](const Eigen::VectorXd& x) {
    if (A.rows() > 0 && (A * x - b).maxCoeff() > 1e-9) return false;
    if (E.rows() > 0 && (E * x - f).cwiseAbs().maxCoeff() > 1e-9) return false;
    return true;
  };
  s.project = [A, b, E, f](const Eigen::VectorXd& x) {
    QpProblem p;
    const int d = static_cast<int>(x.size());
    p.P = Eigen::MatrixXd::Identity(d, d);
    p.q = -x;
    p.A = A;
    p.b = b;
    p.E = E;
    p.f = f;
    const SolveReport rep = qp_solve(p);
    if (rep.status != SolveStatus::Optimal)
      throw std::runtime_error("projection onto polyhedron failed: " + to_string(rep.status));
    return rep.x;
  };
  return s;
}

SolveReport gradient_solve(const FunctionOracle& f, const Eigen::VectorXd& x0,
                           double gamma, int max_iter, double tol) {
  if (!f.smooth) throw std::invalid_argument("gradient_solve: needs a smooth oracle");
  if (!(gamma > 0.0) || (std::isfinite(f.lipschitz) && gamma >= 2.0 / f.lipschitz))
    throw std::invalid_argument("gradient_solve: step must satisfy 0 < gamma < 2/L");
  Eigen::VectorXd x = x0;
  double last_value = f.value(x);
  int increases = 0;
  SolveReport rep;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd g = f.subgradient(x);
    const double gn = g.norm();
    if (gn <= tol) {
      rep.x = x;
      rep.value = f.value(x);
      rep.status = SolveStatus::Optimal;
      rep.iterations = it;
      rep.residual = gn;
      return rep;
    }
    x -= gamma * g;
    const double v = f.value(x);
    increases = (v > last_value) ? increases + 1 : 0;
    last_value = v;
    if (increases >= 10) break;  // diverging
  }
  rep.x = x;
  rep.value = f.value(x);
  rep.status = SolveStatus::MaxIter;
  rep.iterations = max_iter;
  rep.residual = f.subgradient(x).norm();
  return rep;
}

SolveReport projected_subgradient_solve(const FunctionOracle& f,
                                        const SetOracle& X,
                                        const StepSchedule& sched,
                                        const Eigen::VectorXd& x0,
                                        int max_iter) {
  Eigen::VectorXd x = X.whole_space ? x0 : X.project(x0);
  Eigen::VectorXd best_x = x;
  double best_v = f.value(x);
  for (int t = 0; t < max_iter; ++t) {
    x -= sched.at(t) * f.subgradient(x);
    if (!X.whole_space) x = X.project(x);
    const double v = f.value(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  SolveReport rep;
  rep.x = best_x;
  rep.value = best_v;
  rep.status = SolveStatus::MaxIter;
  rep.iterations = max_iter;
  return rep;
}

namespace {

// Collapse sum_k w_k ||x - z_k||^2 into W ||x||^2 - 2 (sum w_k z_k)' x + const.
struct AnchorSum {
  double W = 0.0;
  Eigen::VectorXd wz;     // sum w_k z_k
  double const_term = 0.0;  // sum w_k ||z_k||^2
};

AnchorSum collapse(const std::vector<Anchor>& anchors, int d) {
  AnchorSum s;
  s.wz = Eigen::VectorXd::Zero(d);
  for (const auto& a : anchors) {
    if (a.z.size() != d) throw std::invalid_argument("anchor dimension mismatch");
    s.W += a.weight;
    s.wz += a.weight * a.z;
    s.const_term += a.weight * a.z.squaredNorm();
  }
  return s;
}

}  // namespace

SolveReport regularized_argmin(const FunctionOracle& f, const SetOracle& X,
                               const Eigen::VectorXd& ell,
                               const std::vector<Anchor>& anchors, double rho,
                               const ArgminOptions& opt) {
  const int d = f.dim;
  if (ell.size() != d) throw std::invalid_argument("regularized_argmin: ell dimension mismatch");
  const AnchorSum anc = collapse(anchors, d);
  const double W = rho * anc.W;

  auto objective = [&](const Eigen::VectorXd& x) {
    double v = f.value(x) + ell.dot(x);
    v += 0.5 * rho * (anc.W * x.squaredNorm() - 2.0 * anc.wz.dot(x) + anc.const_term);
    return v;
  };

  // QP path: exact epigraph/quadratic model plus polyhedral (or free) set.
  const bool model_ok = f.argmin_model.has_value() || f.has_quadratic;
  if (model_ok && (X.whole_space || X.polyhedral)) {
    QpProblem p;
    int n_aux = 0;
    if (f.argmin_model) {
      p = f.argmin_model->model;
      n_aux = f.argmin_model->n_aux;
    } else {
      p.P = f.P;
      p.q = f.q;
      p.c0 = f.c0;
    }
    const int dim = d + n_aux;
    if (p.P.size() == 0) p.P = Eigen::MatrixXd::Zero(dim, dim);
    if (p.q.size() == 0) p.q = Eigen::VectorXd::Zero(dim);
    p.q.head(d) += ell;
    if (W > 0.0) {
      p.P.topLeftCorner(d, d).diagonal().array() += W;
      p.q.head(d) -= rho * anc.wz;
      p.c0 += 0.5 * rho * anc.const_term;
    }
    if (!X.whole_space) {
      const int k = static_cast<int>(X.b.size());
      const int ke = static_cast<int>(X.f.size());
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p.b.size() + k, dim);
      Eigen::VectorXd b(p.b.size() + k);
      if (p.b.size() > 0) {
        A.topRows(p.b.size()) = p.A;
        b.head(p.b.size()) = p.b;
      }
      if (k > 0) {
        A.block(p.b.size(), 0, k, d) = X.A;
        b.tail(k) = X.b;
      }
      p.A = A;
      p.b = b;
      if (ke > 0) {
        Eigen::MatrixXd E = Eigen::MatrixXd::Zero(p.f.size() + ke, dim);
        Eigen::VectorXd fe(p.f.size() + ke);
        if (p.f.size() > 0) {
          E.topRows(p.f.size()) = p.E;
          fe.head(p.f.size()) = p.f;
        }
        E.block(p.f.size(), 0, ke, d) = X.E;
        fe.tail(ke) = X.f;
        p.E = E;
        p.f = fe;
      }
    }
    QpOptions qopt;
    qopt.tol = opt.tol * 0.1;
    SolveReport rep = qp_solve(p, qopt);
    if (rep.status == SolveStatus::Optimal || rep.status == SolveStatus::MaxIter) {
      rep.x = rep.x.head(d).eval();
      rep.value = objective(rep.x);
    }
    return rep;
  }

  // Proximal path: single effective anchor on the whole space.
  if (f.prox && X.whole_space && W > 0.0) {
    const Eigen::VectorXd target = (rho * anc.wz - ell) / W;
    SolveReport rep;
    rep.x = f.prox(target, 1.0 / W);
    rep.value = objective(rep.x);
    rep.status = SolveStatus::Optimal;
    rep.iterations = 1;
    rep.residual = 0.0;
    return rep;
  }

  // Iterative fallback.
  FunctionOracle phi;
  phi.dim = d;
  phi.smooth = f.smooth;
  phi.value = objective;
  phi.subgradient = [&f, ell, rho, anc](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = f.subgradient(x) + ell;
    g += rho * (anc.W * x - anc.wz);
    return g;
  };
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(d);
  if (anc.W > 0.0) x0 = anc.wz / anc.W;
  if (f.smooth && std::isfinite(f.lipschitz)) {
    phi.lipschitz = f.lipschitz + W;
    // Accelerated projected gradient (constant step 1/L).
    const double L = phi.lipschitz;
    Eigen::VectorXd x = X.whole_space ? x0 : X.project(x0);
    Eigen::VectorXd y = x;
    double tk = 1.0;
    SolveReport rep;
    for (int it = 0; it < opt.max_iter; ++it) {
      Eigen::VectorXd x_next = y - phi.subgradient(y) / L;
      if (!X.whole_space) x_next = X.project(x_next);
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
      y = x_next + ((tk - 1.0) / t_next) * (x_next - x);
      const double change = (x_next - x).lpNorm<Eigen::Infinity>();
      x = x_next;
      tk = t_next;
      if (change <= opt.tol * (1.0 + x.lpNorm<Eigen::Infinity>())) {
        rep.x = x;
        rep.value = objective(x);
        rep.status = SolveStatus::Optimal;
        rep.iterations = it;
        rep.residual = change;
        return rep;
      }
    }
    rep.x = x;
    rep.value = objective(x);
    rep.status = SolveStatus::MaxIter;
    rep.iterations = opt.max_iter;
    return rep;
  }
  // Nonsmooth: projected subgradient, strongly convex rate when W > 0.
  const double mu = f.strong_convexity + W;
  StepSchedule sched = (mu > 0.0) ? StepSchedule::harmonic() : StepSchedule::power(1.0, 0.51);
  if (mu > 0.0) {
    // gamma_t = 2 / (mu (t+2)); harmonic shape, rescaled below.
    sched = StepSchedule::harmonic();
  }
  FunctionOracle scaled = phi;
  SolveReport rep;
  Eigen::VectorXd x = X.whole_space ? x0 : X.project(x0);
  Eigen::VectorXd best = x;
  double best_v = objective(x);
  for (int t = 0; t < opt.max_iter; ++t) {
    const double gamma = (mu > 0.0) ? 2.0 / (mu * (t + 2)) : 1.0 / std::sqrt(t + 1.0);
    x -= gamma * phi.subgradient(x);
    if (!X.whole_space) x = X.project(x);
    const double v = objective(x);
    if (v < best_v) {
      best_v = v;
      best = x;
    }
  }
  rep.x = best;
  rep.value = best_v;
  rep.status = SolveStatus::MaxIter;
  rep.iterations = opt.max_iter;
  return rep;
}

SolveReport primal_dual_solve(const QpProblem& p) {
  const int m = p.n_ineq();
  const int ne = p.n_eq();
  if (p.P.size() == 0 || p.P.cwiseAbs().maxCoeff() == 0.0) {
    // LP: simplex gives exact vertex duals and Farkas certificates.
    Eigen::MatrixXd A(m + 2 * ne, p.dim());
    Eigen::VectorXd b(m + 2 * ne);
    if (m > 0) {
      A.topRows(m) = p.A;
      b.head(m) = p.b;
    }
    if (ne > 0) {
      A.middleRows(m, ne) = p.E;
      b.segment(m, ne) = p.f;
      A.bottomRows(ne) = -p.E;
      b.tail(ne) = -p.f;
    }
    SolveReport rep = lp_solve(p.q, A, b);
    if (rep.status == SolveStatus::Optimal) {
      rep.eq_multipliers = rep.multipliers.segment(m, ne) - rep.multipliers.tail(ne);
      rep.multipliers = rep.multipliers.head(m).eval();
      rep.value += p.c0;
      rep.residual = kkt_residual(p, rep.x, rep.multipliers, rep.eq_multipliers);
    }
    return rep;
  }
  QpOptions opt;
  opt.tol = 1e-10;
  SolveReport rep = qp_solve(p, opt);
  if (rep.status == SolveStatus::Optimal)
    rep.residual = kkt_residual(p, rep.x, rep.multipliers, rep.eq_multipliers);
  return rep;
}

namespace {

// One ADMM block update: argmin_{u in C} g(u) + lam'(M u) + (rho/2)||M u + rest||^2.
Eigen::VectorXd admm_block_update(const FunctionOracle& g, const SetOracle& C,
                                  const Eigen::MatrixXd& M,
                                  const Eigen::VectorXd& rest,
                                  const Eigen::VectorXd& lam, double rho) {
  const int d = g.dim;
  const bool identity = (M.rows() == d && M.cols() == d &&
                         M.isApprox(Eigen::MatrixXd::Identity(d, d), 1e-12));
  if (g.has_quadratic || g.argmin_model) {
    QpProblem p;
    int n_aux = 0;
    if (g.argmin_model) {
      p = g.argmin_model->model;
      n_aux = g.argmin_model->n_aux;
    } else {
      p.P = g.P;
      p.q = g.q;
    }
    const int dim = d + n_aux;
    if (p.P.size() == 0) p.P = Eigen::MatrixXd::Zero(dim, dim);
    if (p.q.size() == 0) p.q = Eigen::VectorXd::Zero(dim);
    p.P.topLeftCorner(d, d) += rho * M.transpose() * M;
    p.q.head(d) += M.transpose() * (lam + rho * rest);
    if (!C.whole_space && C.polyhedral) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p.b.size() + C.b.size(), dim);
      Eigen::VectorXd b(p.b.size() + C.b.size());
      if (p.b.size() > 0) {
        A.topRows(p.b.size()) = p.A;
        b.head(p.b.size()) = p.b;
      }
      if (C.b.size() > 0) {
        A.block(p.b.size(), 0, C.b.size(), d) = C.A;
        b.tail(C.b.size()) = C.b;
      }
      p.A = A;
      p.b = b;
    }
    const SolveReport rep = qp_solve(p);
    if (rep.status != SolveStatus::Optimal)
      throw std::runtime_error("centralized_admm: block update failed: " + to_string(rep.status));
    return rep.x.head(d);
  }
  if (g.prox && C.whole_space && identity) {
    return g.prox(-rest - lam / rho, 1.0 / rho);
  }
  throw std::invalid_argument("centralized_admm: oracle needs a quadratic model or a prox with identity coupling");
}

}  // namespace

SolveReport centralized_admm(const FunctionOracle& g1, const SetOracle& c1,
                             const FunctionOracle& g2, const SetOracle& c2,
                             const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::VectorXd& c, double rho,
                             int max_iter, double tol) {
  if (rho <= 0.0) throw std::invalid_argument("centralized_admm: rho must be > 0");
  const int m = static_cast<int>(c.size());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(g1.dim);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(g2.dim);
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);
  SolveReport rep;
  for (int it = 0; it < max_iter; ++it) {
    x = admm_block_update(g1, c1, A, B * z + c, lam, rho);
    const Eigen::VectorXd z_prev = z;
    z = admm_block_update(g2, c2, B, A * x + c, lam, rho);
    const Eigen::VectorXd r = A * x + B * z + c;
    const Eigen::VectorXd s = rho * A.transpose() * B * (z - z_prev);
    lam += rho * r;
    if (r.lpNorm<Eigen::Infinity>() <= tol &&
        s.lpNorm<Eigen::Infinity>() <= tol) {
      rep.status = SolveStatus::Optimal;
      rep.iterations = it + 1;
      rep.residual = r.lpNorm<Eigen::Infinity>();
      rep.x.resize(x.size() + z.size());
      rep.x << x, z;
      rep.value = g1.value(x) + g2.value(z);
      rep.eq_multipliers = lam;
      return rep;
    }
  }
  rep.status = SolveStatus::MaxIter;
  rep.iterations = max_iter;
  rep.x.resize(x.size() + z.size());
  rep.x << x, z;
  rep.value = g1.value(x) + g2.value(z);
  rep.eq_multipliers = lam;
  rep.residual = (A * x + B * z + c).lpNorm<Eigen::Infinity>();
  return rep;
}

namespace {

constexpr int kDiskSides = 360;

// Stack the row form of the descriptors (disks become tangent polygons)
// plus the bounding box.
void stack_descriptor_rows(const std::vector<const ConstraintDescriptor*>& sets,
                           int d, double box_radius, Eigen::MatrixXd* A,
                           Eigen::VectorXd* b) {
  int rows = 2 * d;  // box
  for (const auto* s : sets) rows += s->is_disk() ? kDiskSides : static_cast<int>(s->b.size());
  A->setZero(rows, d);
  b->resize(rows);
  int r = 0;
  for (const auto* s : sets) {
    if (s->is_disk()) {
      if (d != 2) throw std::invalid_argument("disk descriptors require dimension 2");
      for (int k = 0; k < kDiskSides; ++k) {
        const double th = 2.0 * M_PI * k / kDiskSides;
        const Eigen::Vector2d n(std::cos(th), std::sin(th));
        A->row(r) = n.transpose();
        (*b)(r) = n.dot(s->center) + s->radius;
        ++r;
      }
    } else {
      A->middleRows(r, s->b.size()) = s->A;
      b->segment(r, s->b.size()) = s->b;
      r += static_cast<int>(s->b.size());
    }
  }
  A->middleRows(r, d) = Eigen::MatrixXd::Identity(d, d);
  b->segment(r, d).setConstant(box_radius);
  A->bottomRows(d) = -Eigen::MatrixXd::Identity(d, d);
  b->tail(d).setConstant(box_radius);
}

}  // namespace

SolveReport lex_solve_descriptors(
    const std::vector<const ConstraintDescriptor*>& sets,
    const Eigen::VectorXd& c, const Eigen::MatrixXd& P, double box_radius) {
  const int d = static_cast<int>(c.size());
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  stack_descriptor_rows(sets, d, box_radius, &A, &b);
  if (P.size() == 0) return lexmin_lp(c, A, b);

  // Quadratic cost: solve the QP, then lex-minimize over the optimal face
  // {x feasible : P x = P x*, c'x = c'x*}.
  QpProblem p;
  p.P = P;
  p.q = c;
  p.A = A;
  p.b = b;
  SolveReport qp = qp_solve(p);
  if (qp.status != SolveStatus::Optimal) return qp;
  const Eigen::VectorXd px = P * qp.x;
  const double cx = c.dot(qp.x);
  // Band width for the optimal-face rows; must absorb the interior-point
  // accuracy of qp.x, so it is wider than the simplex pivot tolerance.
  const double face_tol = 1e-7 * (1.0 + qp.x.cwiseAbs().maxCoeff());
  const int K = static_cast<int>(b.size());

  // Face rows: P x = P x* (only the nonzero rows of P carry information)
  // and c'x = c'x*, each as a pair of inequalities.
  std::vector<Eigen::RowVectorXd> frows;
  std::vector<double> frhs;
  for (int k = 0; k < d; ++k) {
    if (P.row(k).cwiseAbs().maxCoeff() == 0.0) continue;
    frows.emplace_back(P.row(k));
    frhs.push_back(px(k) + face_tol);
    frows.emplace_back(-P.row(k));
    frhs.push_back(-px(k) + face_tol);
  }
  frows.emplace_back(c.transpose());
  frhs.push_back(cx + face_tol);
  frows.emplace_back(-c.transpose());
  frhs.push_back(-cx + face_tol);

  // Lex-minimize over the rows active at x* plus the face band; inactive
  // rows cannot shrink the face unless the reduced solution violates them,
  // in which case they are added and the solve repeats (cutting planes).
  std::vector<bool> in(K, false);
  const int n_box = 2 * d;  // box rows sit at the bottom of the stack
  for (int k = K - n_box; k < K; ++k) in[k] = true;
  for (int k = 0; k < K - n_box; ++k)
    in[k] = A.row(k).dot(qp.x) >= b(k) - 1e-6 * (1.0 + std::abs(b(k)));
  SolveReport rep;
  for (int pass = 0;; ++pass) {
    int n_in = 0;
    for (int k = 0; k < K; ++k) n_in += in[k];
    Eigen::MatrixXd Af(n_in + frows.size(), d);
    Eigen::VectorXd bf(n_in + frows.size());
    int r = 0;
    for (int k = 0; k < K; ++k) {
      if (!in[k]) continue;
      Af.row(r) = A.row(k);
      bf(r) = b(k);
      ++r;
    }
    for (size_t k = 0; k < frows.size(); ++k) {
      Af.row(r) = frows[k];
      bf(r) = frhs[k];
      ++r;
    }
    rep = lexmin_lp(c, Af, bf);
    if (rep.status != SolveStatus::Optimal) break;
    bool clean = true;
    for (int k = 0; k < K; ++k) {
      if (in[k]) continue;
      if (A.row(k).dot(rep.x) > b(k) + 1e-9 * (1.0 + std::abs(b(k)))) {
        in[k] = true;
        clean = false;
      }
    }
    if (clean) break;
    if (pass > 50)
      throw std::runtime_error("lex_solve_descriptors: cutting-plane loop did not settle");
  }
  if (rep.status == SolveStatus::Optimal)
    rep.value = 0.5 * rep.x.dot(P * rep.x) + c.dot(rep.x);
  return rep;
}

namespace {

// Optimal value over a descriptor subset (no lex refinement); used to rule
// out drop candidates cheaply before the expensive lex probe.
SolveReport descriptor_value_solve(
    const std::vector<const ConstraintDescriptor*>& sub,
    const Eigen::VectorXd& c, const Eigen::MatrixXd& P, double box_radius) {
  const int d = static_cast<int>(c.size());
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  stack_descriptor_rows(sub, d, box_radius, &A, &b);
  if (P.size() == 0) return lp_solve(c, A, b);
  QpProblem p;
  p.P = P;
  p.q = c;
  p.A = A;
  p.b = b;
  return qp_solve(p);
}

}  // namespace

std::vector<int> extract_descriptor_basis(
    const std::vector<const ConstraintDescriptor*>& sets,
    const Eigen::VectorXd& c, const Eigen::MatrixXd& P, double box_radius,
    const Eigen::VectorXd& x_star, int delta) {
  const double tol = 1e-7 * (1.0 + x_star.cwiseAbs().maxCoeff());
  const double f_star =
      (P.size() > 0 ? 0.5 * x_star.dot(P * x_star) : 0.0) + c.dot(x_star);
  const double vtol = 1e-6 * (1.0 + std::abs(f_star));
  std::vector<int> keep(sets.size());
  for (size_t i = 0; i < sets.size(); ++i) keep[i] = static_cast<int>(i);
  for (size_t pos = 0; pos < keep.size();) {
    std::vector<int> reduced = keep;
    reduced.erase(reduced.begin() + pos);
    std::vector<const ConstraintDescriptor*> sub;
    for (int idx : reduced) sub.push_back(sets[idx]);
    // A drop is only possible when the relaxed value stays put; checking
    // the value alone skips the lex stages for most rejections.
    const SolveReport value_probe = descriptor_value_solve(sub, c, P, box_radius);
    if (value_probe.status == SolveStatus::Optimal &&
        value_probe.value < f_star - vtol) {
      ++pos;
      continue;
    }
    const SolveReport probe = lex_solve_descriptors(sub, c, P, box_radius);
    if (probe.status == SolveStatus::Optimal &&
        (probe.x - x_star).cwiseAbs().maxCoeff() <= tol) {
      keep = reduced;
    } else {
      ++pos;
    }
  }
  if (static_cast<int>(keep.size()) > delta)
    throw std::runtime_error("extract_descriptor_basis: basis exceeds the combinatorial dimension");
  return keep;
}

namespace {

SolveReport reference_random_qp(const CostCoupledProblem& prob) {
  const int d = prob.d;
  Eigen::MatrixXd Psum = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd rsum = Eigen::VectorXd::Zero(d);
  for (size_t i = 0; i < prob.qp_Q.size(); ++i) {
    Psum += 2.0 * prob.qp_Q[i];
    rsum += prob.qp_r[i];
  }
  SolveReport rep;
  rep.x = Psum.llt().solve(-rsum);
  rep.value = 0.0;
  for (const auto& f : prob.agents) rep.value += f.value(rep.x);
  rep.status = SolveStatus::Optimal;
  rep.iterations = 1;
  rep.residual = (Psum * rep.x + rsum).lpNorm<Eigen::Infinity>();
  return rep;
}

SolveReport reference_logistic(const CostCoupledProblem& prob) {
  const int d = static_cast<int>(prob.data_points.cols());
  const int n = static_cast<int>(prob.labels.size());
  const int N = prob.n_agents();
  Eigen::VectorXd wb = Eigen::VectorXd::Zero(d + 1);
  SolveReport rep;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(d + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d + 1, d + 1);
    H.topLeftCorner(d, d) = prob.logistic_C * Eigen::MatrixXd::Identity(d, d);
    g.head(d) = prob.logistic_C * wb.head(d);
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd u(d + 1);
      u.head(d) = prob.data_points.row(j).transpose();
      u(d) = 1.0;
      const double z = u.dot(wb);
      const double l = prob.labels(j);
      const double s = 1.0 / (1.0 + std::exp(l * z));
      g += -l * s * u;
      H += s * (1.0 - s) * u * u.transpose();
    }
    if (g.lpNorm<Eigen::Infinity>() <= 1e-12) {
      rep.iterations = it;
      break;
    }
    wb -= H.ldlt().solve(g);
    rep.iterations = it + 1;
  }
  rep.x = wb;
  rep.value = 0.0;
  for (const auto& f : prob.agents) rep.value += f.value(wb);
  rep.status = SolveStatus::Optimal;
  rep.residual = 0.0;
  return rep;
}

SolveReport reference_lasso(const CostCoupledProblem& prob) {
  const int d = prob.d;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  double b2 = 0.0;
  for (size_t i = 0; i < prob.lasso_D.size(); ++i) {
    M += prob.lasso_D[i].transpose() * prob.lasso_D[i];
    v += prob.lasso_D[i].transpose() * prob.lasso_b[i];
    b2 += prob.lasso_b[i].squaredNorm();
  }
  const double L = std::max(2.0 * M.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff(), 1e-12);
  const double rho = prob.lasso_rho;
  auto value = [&](const Eigen::VectorXd& x) {
    return x.dot(M * x) - 2.0 * v.dot(x) + b2 + rho * x.lpNorm<1>();
  };
  auto soft = [](double a, double t) {
    return (a > t) ? a - t : (a < -t ? a + t : 0.0);
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d), y = x;
  double tk = 1.0;
  SolveReport rep;
  for (int it = 0; it < 200000; ++it) {
    const Eigen::VectorXd grad = 2.0 * (M * y - v);
    Eigen::VectorXd x_next = y - grad / L;
    for (int k = 0; k < d; ++k) x_next(k) = soft(x_next(k), rho / L);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    y = x_next + ((tk - 1.0) / t_next) * (x_next - x);
    const double change = (x_next - x).lpNorm<Eigen::Infinity>();
    x = x_next;
    tk = t_next;
    rep.iterations = it + 1;
    if (change <= 1e-14 * (1.0 + x.lpNorm<Eigen::Infinity>())) break;
  }
  rep.x = x;
  rep.value = value(x);
  rep.status = SolveStatus::Optimal;
  rep.residual = 0.0;
  return rep;
}

}  // namespace

SolveReport centralized_reference_solve(const CostCoupledProblem& prob) {
  if (prob.family == "qp") return reference_random_qp(prob);
  if (prob.family == "logistic") return reference_logistic(prob);
  if (prob.family == "lasso") return reference_lasso(prob);
  // Generic quadratic-sum fallback.
  bool all_quadratic = true;
  for (const auto& f : prob.agents) all_quadratic = all_quadratic && f.has_quadratic;
  if (!all_quadratic)
    throw std::invalid_argument("centralized_reference_solve: no reference path for family '" + prob.family + "'");
  QpProblem p;
  p.P = Eigen::MatrixXd::Zero(prob.d, prob.d);
  p.q = Eigen::VectorXd::Zero(prob.d);
  for (const auto& f : prob.agents) {
    p.P += f.P;
    p.q += f.q;
    p.c0 += f.c0;
  }
  if (!prob.constraint.whole_space && prob.constraint.polyhedral) {
    p.A = prob.constraint.A;
    p.b = prob.constraint.b;
    p.E = prob.constraint.E;
    p.f = prob.constraint.f;
  }
  return qp_solve(p);
}

SolveReport centralized_reference_solve(const CommonCostProblem& prob) {
  std::vector<const ConstraintDescriptor*> sets;
  for (const auto& group : prob.agent_sets)
    for (const auto& d : group) sets.push_back(&d);
  return lex_solve_descriptors(sets, prob.c, prob.cost_P, prob.box_radius);
}

SolveReport centralized_reference_solve(const ConstraintCoupledProblem& prob) {
  int vars = 0, ineq = 0, eq = 0;
  std::vector<int> offset;
  for (const auto& a : prob.agents) {
    offset.push_back(vars);
    vars += a.d + a.n_aux;
    ineq += static_cast<int>(a.local.b.size());
    eq += static_cast<int>(a.local.f.size());
  }
  QpProblem p;
  p.P = Eigen::MatrixXd::Zero(vars, vars);
  p.q = Eigen::VectorXd::Zero(vars);
  p.A = Eigen::MatrixXd::Zero(ineq + prob.S, vars);
  p.b = Eigen::VectorXd::Zero(ineq + prob.S);
  if (eq > 0) {
    p.E = Eigen::MatrixXd::Zero(eq, vars);
    p.f = Eigen::VectorXd::Zero(eq);
  }
  int ri = 0, re = 0;
  Eigen::VectorXd hsum = Eigen::VectorXd::Zero(prob.S);
  for (size_t i = 0; i < prob.agents.size(); ++i) {
    const auto& a = prob.agents[i];
    const int dim = a.d + a.n_aux;
    if (a.local.P.size() > 0) p.P.block(offset[i], offset[i], dim, dim) = a.local.P;
    p.q.segment(offset[i], dim) = a.local.q;
    p.c0 += a.local.c0;
    const int k = static_cast<int>(a.local.b.size());
    p.A.block(ri, offset[i], k, dim) = a.local.A;
    p.b.segment(ri, k) = a.local.b;
    ri += k;
    const int ke = static_cast<int>(a.local.f.size());
    if (ke > 0) {
      p.E.block(re, offset[i], ke, dim) = a.local.E;
      p.f.segment(re, ke) = a.local.f;
      re += ke;
    }
    // Coupling rows live last so the multiplier block is easy to slice.
    p.A.block(ineq, offset[i], prob.S, dim) = a.G;
    hsum += a.h;
  }
  p.b.tail(prob.S) = -hsum;
  SolveReport rep = primal_dual_solve(p);
  if (rep.status == SolveStatus::Optimal)
    rep.multipliers = rep.multipliers.tail(prob.S).eval();
  return rep;
}

}  // namespace dopt
