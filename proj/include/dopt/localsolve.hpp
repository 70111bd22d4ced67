#ifndef DOPT_LOCALSOLVE_HPP
#define DOPT_LOCALSOLVE_HPP

#include <Eigen/Dense>
#include <vector>

#include "dopt/lexlp.hpp"
#include "dopt/oracles.hpp"
#include "dopt/problems.hpp"
#include "dopt/qp.hpp"
#include "dopt/schedule.hpp"
#include "dopt/solve_report.hpp"

namespace dopt {

// Plain gradient descent with fixed step. Requires gamma in (0, 2/L).
// Ten consecutive value increases trip divergence detection (max_iter
// status with the gradient norm as residual).
SolveReport gradient_solve(const FunctionOracle& f, const Eigen::VectorXd& x0,
                           double gamma, int max_iter = 100000,
                           double tol = 1e-9);

// Projected subgradient with a diminishing schedule; returns the best
// iterate by value. Always reports max_iter (no stationarity test exists
// for subgradients).
SolveReport projected_subgradient_solve(const FunctionOracle& f,
                                        const SetOracle& X,
                                        const StepSchedule& sched,
                                        const Eigen::VectorXd& x0,
                                        int max_iter = 100000);

// Quadratic anchor (rho/2) * weight * ||x - z||^2.
struct Anchor {
  double weight = 1.0;
  Eigen::VectorXd z;
};

struct ArgminOptions {
  double tol = 1e-9;
  int max_iter = 100000;
};

// min_{x in X} f(x) + ell'x + (rho/2) sum_k w_k ||x - z_k||^2.
// Dispatches to a dense QP when f carries a quadratic/epigraph model, to
// the proximal map when one is supplied, else to accelerated projected
// (sub)gradient iterations.
SolveReport regularized_argmin(const FunctionOracle& f, const SetOracle& X,
                               const Eigen::VectorXd& ell,
                               const std::vector<Anchor>& anchors, double rho,
                               const ArgminOptions& opt = {});

// Primal-dual optimal pair (x*, mu*) of a dense QP/LP with KKT residual
// <= 1e-7. LPs route through the simplex so infeasibility comes with a
// Farkas-style certificate.
SolveReport primal_dual_solve(const QpProblem& p);

// Two-block ADMM for min g1(x) + g2(z) s.t. A x + B z + c = 0, x in c1,
// z in c2. The stacked (x, z) iterate is returned in x; the equality
// multiplier in eq_multipliers; residual is ||Ax + Bz + c||_inf.
SolveReport centralized_admm(const FunctionOracle& g1, const SetOracle& c1,
                             const FunctionOracle& g2, const SetOracle& c2,
                             const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::VectorXd& c, double rho,
                             int max_iter = 10000, double tol = 1e-9);

// Lex-optimal solution over an intersection of constraint descriptors with
// linear cost c (P empty) or quadratic cost 1/2 x'P x + c'x. Disks are
// handled through a fine tangent-polygon outer model; quadratic costs are
// reduced to a lex LP over the optimal face.
SolveReport lex_solve_descriptors(
    const std::vector<const ConstraintDescriptor*>& sets,
    const Eigen::VectorXd& c, const Eigen::MatrixXd& P, double box_radius);

// Minimal descriptor subset whose lex solution reproduces x_star, by
// greedy drop-one re-solve. Indices refer to `sets`; throws when more than
// `delta` descriptors survive.
std::vector<int> extract_descriptor_basis(
    const std::vector<const ConstraintDescriptor*>& sets,
    const Eigen::VectorXd& c, const Eigen::MatrixXd& P, double box_radius,
    const Eigen::VectorXd& x_star, int delta);

// Centralized reference optima (f*, x*, and coupling multipliers mu* for
// constraint-coupled instances) used by metrics and acceptance tests.
SolveReport centralized_reference_solve(const CostCoupledProblem& prob);
SolveReport centralized_reference_solve(const CommonCostProblem& prob);
SolveReport centralized_reference_solve(const ConstraintCoupledProblem& prob);

}  // namespace dopt

#endif  // DOPT_LOCALSOLVE_HPP
