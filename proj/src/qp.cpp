#include "dopt/qp.hpp"

#include <algorithm>
#include <stdexcept>

namespace dopt {

namespace {

double qp_value(const QpProblem& p, const Eigen::VectorXd& x) {
  double v = p.c0 + p.q.dot(x);
  if (p.P.size() > 0) v += 0.5 * x.dot(p.P * x);
  return v;
}

// Equality-constrained (or unconstrained) case: one KKT solve.
SolveReport solve_no_inequalities(const QpProblem& p) {
  const int n = p.dim();
  const int ne = p.n_eq();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + ne, n + ne);
  if (p.P.size() > 0) K.topLeftCorner(n, n) = p.P;
  if (ne > 0) {
    K.topRightCorner(n, ne) = p.E.transpose();
    K.bottomLeftCorner(ne, n) = p.E;
  }
  Eigen::VectorXd rhs(n + ne);
  rhs.head(n) = -p.q;
  if (ne > 0) rhs.tail(ne) = p.f;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  SolveReport rep;
  rep.multipliers = Eigen::VectorXd::Zero(0);
  const Eigen::VectorXd sol = lu.solve(rhs);
  const double res = (K * sol - rhs).cwiseAbs().maxCoeff() /
                     (1.0 + rhs.cwiseAbs().maxCoeff());
  if (!lu.isInvertible() && res > 1e-8) {
    // Inconsistent KKT system: the objective has a feasible descent ray
    // (or the equalities are contradictory).
    rep.status = (ne > 0 && (p.E * sol - p.f).cwiseAbs().maxCoeff() > 1e-8)
                     ? SolveStatus::Infeasible
                     : SolveStatus::Unbounded;
    return rep;
  }
  rep.x = sol.head(n);
  rep.eq_multipliers = sol.tail(ne);
  rep.value = qp_value(p, rep.x);
  rep.status = SolveStatus::Optimal;
  rep.residual = res;
  rep.iterations = 1;
  return rep;
}

}  // namespace

double kkt_residual(const QpProblem& p, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& mu, const Eigen::VectorXd& y) {
  Eigen::VectorXd grad = p.q;
  if (p.P.size() > 0) grad += p.P * x;
  if (p.n_ineq() > 0) grad += p.A.transpose() * mu;
  if (p.n_eq() > 0) grad += p.E.transpose() * y;
  double res = grad.cwiseAbs().maxCoeff();
  if (p.n_ineq() > 0) {
    const Eigen::VectorXd slack = p.b - p.A * x;
    res = std::max(res, (-slack).maxCoeff());              // primal feasibility
    res = std::max(res, (-mu).maxCoeff());                 // dual feasibility
    res = std::max(res, mu.cwiseProduct(slack).cwiseAbs().maxCoeff());
  }
  if (p.n_eq() > 0) res = std::max(res, (p.E * x - p.f).cwiseAbs().maxCoeff());
  return res;
}

SolveReport qp_solve(const QpProblem& p, const QpOptions& opt) {
  const int n = p.dim();
  const int m = p.n_ineq();
  const int ne = p.n_eq();
  if (p.P.size() > 0 && (p.P.rows() != n || p.P.cols() != n))
    throw std::invalid_argument("qp_solve: P dimension mismatch");
  if (m > 0 && p.A.cols() != n)
    throw std::invalid_argument("qp_solve: A dimension mismatch");
  if (ne > 0 && p.E.cols() != n)
    throw std::invalid_argument("qp_solve: E dimension mismatch");
  if (m == 0) return solve_no_inequalities(p);

  // Primal-dual interior point with Mehrotra predictor-corrector.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (ne > 0) x = p.E.colPivHouseholderQr().solve(p.f);
  Eigen::VectorXd s = (p.b - p.A * x).cwiseMax(1.0);
  Eigen::VectorXd z = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(ne);

  const double scale = 1.0 + std::max(p.q.cwiseAbs().maxCoeff(),
                                      p.b.size() ? p.b.cwiseAbs().maxCoeff() : 0.0);
  SolveReport rep;
  const int dim_kkt = n + ne;
  Eigen::MatrixXd K(dim_kkt, dim_kkt);
  Eigen::VectorXd rhs(dim_kkt);

  for (int it = 0; it < opt.max_iter; ++it) {
    Eigen::VectorXd rd = p.q + p.A.transpose() * z;
    if (p.P.size() > 0) rd += p.P * x;
    if (ne > 0) rd += p.E.transpose() * y;
    const Eigen::VectorXd rp = p.A * x + s - p.b;
    const Eigen::VectorXd re = ne > 0 ? (p.E * x - p.f).eval() : Eigen::VectorXd();
    const double gap = s.dot(z) / m;
    const double worst =
        std::max({rd.cwiseAbs().maxCoeff(), rp.cwiseAbs().maxCoeff(),
                  ne > 0 ? re.cwiseAbs().maxCoeff() : 0.0, gap});

    if (worst <= opt.tol * scale) {
      rep.x = x;
      rep.value = qp_value(p, x);
      rep.multipliers = z;
      rep.eq_multipliers = y;
      rep.status = SolveStatus::Optimal;
      rep.iterations = it;
      rep.residual = worst;
      return rep;
    }
    if (x.cwiseAbs().maxCoeff() > opt.blowup) {
      rep.status = SolveStatus::Unbounded;
      rep.iterations = it;
      return rep;
    }
    if (z.cwiseAbs().maxCoeff() > opt.blowup) {
      rep.status = SolveStatus::Infeasible;
      rep.certificate = z / z.cwiseAbs().maxCoeff();
      rep.iterations = it;
      return rep;
    }

    const Eigen::VectorXd d = z.cwiseQuotient(s);  // diag of Z S^-1
    K.setZero();
    K.topLeftCorner(n, n) = p.A.transpose() * d.asDiagonal() * p.A;
    if (p.P.size() > 0) K.topLeftCorner(n, n) += p.P;
    K.topLeftCorner(n, n).diagonal().array() += 1e-12;
    if (ne > 0) {
      K.topRightCorner(n, ne) = p.E.transpose();
      K.bottomLeftCorner(ne, n) = p.E;
      K.bottomRightCorner(ne, ne).diagonal().array() -= 1e-12;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);

    auto solve_direction = [&](const Eigen::VectorXd& rc, Eigen::VectorXd& dx,
                               Eigen::VectorXd& ds, Eigen::VectorXd& dz,
                               Eigen::VectorXd& dy) {
      rhs.head(n) =
          -rd + p.A.transpose() * ((rc - z.cwiseProduct(rp)).cwiseQuotient(s));
      if (ne > 0) rhs.tail(ne) = -re;
      const Eigen::VectorXd sol = lu.solve(rhs);
      dx = sol.head(n);
      dy = sol.tail(ne);
      ds = -rp - p.A * dx;
      dz = (-rc - z.cwiseProduct(ds)).cwiseQuotient(s);
    };

    auto step_length = [](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
      double alpha = 1.0;
      for (int i = 0; i < v.size(); ++i)
        if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
      return alpha;
    };

    // Predictor (affine scaling direction).
    Eigen::VectorXd dx, ds, dz, dy;
    solve_direction(s.cwiseProduct(z), dx, ds, dz, dy);
    const double ap_aff = step_length(s, ds);
    const double ad_aff = step_length(z, dz);
    const double gap_aff =
        (s + ap_aff * ds).dot(z + ad_aff * dz) / m;
    const double sigma = std::pow(std::max(gap_aff, 0.0) / gap, 3);

    // Corrector.
    const Eigen::VectorXd rc = s.cwiseProduct(z) + ds.cwiseProduct(dz) -
                               Eigen::VectorXd::Constant(m, sigma * gap);
    solve_direction(rc, dx, ds, dz, dy);
    const double eta = 0.995;
    const double ap = std::min(1.0, eta * step_length(s, ds));
    const double ad = std::min(1.0, eta * step_length(z, dz));
    x += ap * dx;
    s += ap * ds;
    z += ad * dz;
    if (ne > 0) y += ad * dy;
  }

  rep.x = x;
  rep.value = qp_value(p, x);
  rep.multipliers = z;
  rep.eq_multipliers = y;
  rep.status = SolveStatus::MaxIter;
  rep.iterations = opt.max_iter;
  rep.residual = kkt_residual(p, x, z, y);
  return rep;
}

}  // namespace dopt
