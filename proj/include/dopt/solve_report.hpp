#ifndef DOPT_SOLVE_REPORT_HPP
#define DOPT_SOLVE_REPORT_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>

namespace dopt {

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter };

std::string to_string(SolveStatus s);

// Uniform result record for every local/centralized solver.
struct SolveReport {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd multipliers;     // inequality rows, >= 0 at optimality
  Eigen::VectorXd eq_multipliers;  // equality rows (free sign)
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  // Certificate direction for infeasible LPs (Farkas-style): y >= 0 with
  // y'A = 0 and y'b < 0. Empty unless status == Infeasible and available.
  Eigen::VectorXd certificate;
};

// FNV-1a hash over the minimizer bytes and optimal value; embedded in traces
// so stale oracles are detectable.
std::uint64_t report_hash(const SolveReport& r);

}  // namespace dopt

#endif  // DOPT_SOLVE_REPORT_HPP
