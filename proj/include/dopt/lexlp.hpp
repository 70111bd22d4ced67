#ifndef DOPT_LEXLP_HPP
#define DOPT_LEXLP_HPP

#include <Eigen/Dense>
#include <vector>

#include "dopt/solve_report.hpp"

namespace dopt {

// Basis of a linear program min c'x s.t. a_k'x <= b_k: d row indices whose
// stacked rows P (invertible) and right-hand sides q reproduce the
// lex-optimal solution as P^{-1} q.
struct LpBasis {
  std::vector<int> rows;  // indices into the row set handed to the solver
  Eigen::MatrixXd P;      // d x d stacked constraint rows
  Eigen::VectorXd q;      // d right-hand sides
  std::vector<bool> from_box;  // per selected row: true if it is a box row

  Eigen::VectorXd solution() const { return P.fullPivLu().solve(q); }
};

// Two-phase primal simplex with Bland's anti-cycling rule for
//   min c'x  s.t.  A x <= b   (x free).
// Returns row multipliers (>= 0) and, for infeasible problems, a
// Farkas-style certificate y >= 0 with y'A = 0, y'b < 0.
SolveReport lp_solve(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                     const Eigen::VectorXd& b);

// Lexicographically minimal optimal solution of min c'x s.t. A x <= b,
// computed by the sequential method: first fix the optimal value (imposed as
// an upper cut with tolerance value_fix_tol), then minimize components in
// order. Returns the solution without basis extraction.
SolveReport lexmin_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                      const Eigen::VectorXd& b, double value_fix_tol = 1e-9);

struct LexLpResult {
  SolveReport report;
  LpBasis basis;
};

// Full lexicographic solve with basis extraction. When box_radius > 0, box
// rows |x_i| <= box_radius are appended after the input rows (they may enter
// the basis, flagged via from_box). The returned minimizer is polished to
// P^{-1} q of the extracted basis.
LexLpResult lex_lp_solve(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                         const Eigen::VectorXd& b, double box_radius = 0.0);

// Minimal basis for a known lex-optimal solution: greedy drop-one re-solve
// over the active rows. Throws std::runtime_error when no valid basis of
// exactly d rows can be certified (numerical degeneracy).
LpBasis extract_basis(const Eigen::VectorXd& x_star, const Eigen::VectorXd& c,
                      const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                      int n_plain_rows /* rows beyond this index are box rows */);

// Appendix-style perturbation cross-check: minimizes (c + [d0, d0^2, ...])'x
// in a single solve. Test oracle only; d0 has no computable safe bound.
SolveReport lexmin_lp_perturbed(const Eigen::VectorXd& c,
                                const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& b, double delta0 = 1e-6);

}  // namespace dopt

#endif  // DOPT_LEXLP_HPP
