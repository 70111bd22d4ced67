#ifndef DOPT_QP_HPP
#define DOPT_QP_HPP

#include <Eigen/Dense>

#include "dopt/solve_report.hpp"

namespace dopt {

// Dense convex quadratic program
//   min  1/2 x'P x + q'x + c0
//   s.t. A x <= b,  E x = f
// with P symmetric positive semidefinite (P = 0 gives a linear program).
struct QpProblem {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  double c0 = 0.0;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd E;
  Eigen::VectorXd f;

  int dim() const { return static_cast<int>(q.size()); }
  int n_ineq() const { return static_cast<int>(b.size()); }
  int n_eq() const { return static_cast<int>(f.size()); }
};

struct QpOptions {
  double tol = 1e-10;    // residual and complementarity-gap target
  int max_iter = 200;
  double blowup = 1e12;  // iterate-norm threshold for divergence detection
};

// Primal-dual interior-point method (Mehrotra predictor-corrector).
// Deterministic for fixed inputs. Returns multipliers for the inequality
// rows and eq_multipliers for the equality rows; `residual` is the maximum
// of the KKT residual norms and the complementarity gap.
SolveReport qp_solve(const QpProblem& p, const QpOptions& opt = {});

// Maximum KKT violation of (x, mu, y) for the problem: stationarity,
// primal feasibility, dual feasibility, complementary slackness.
double kkt_residual(const QpProblem& p, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& mu, const Eigen::VectorXd& y);

}  // namespace dopt

#endif  // DOPT_QP_HPP
