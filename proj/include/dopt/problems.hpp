#ifndef DOPT_PROBLEMS_HPP
#define DOPT_PROBLEMS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dopt/oracles.hpp"

namespace dopt {

// ---------------------------------------------------------------------------
// Set-up shapes
// ---------------------------------------------------------------------------

// min_x sum_i f_i(x), x in X shared by everyone.
struct CostCoupledProblem {
  int d = 0;
  std::vector<FunctionOracle> agents;
  SetOracle constraint;

  // Generator metadata; the family-specific fields feed the centralized
  // reference solvers and the serializer.
  std::string family;
  std::uint64_t seed = 0;
  // lasso: f_i = ||D_i x - b_i||^2 + (rho/N)||x||_1
  std::vector<Eigen::MatrixXd> lasso_D;
  std::vector<Eigen::VectorXd> lasso_b;
  double lasso_rho = 0.0;
  // logistic: sample matrix (one row per sample), labels in {-1,+1},
  // owning agent per sample, ridge weight C
  Eigen::MatrixXd data_points;
  Eigen::VectorXd labels;
  std::vector<int> agent_of_sample;
  double logistic_C = 0.0;
  // random qp: f_i = x'Q_i x + r_i'x
  std::vector<Eigen::MatrixXd> qp_Q;
  std::vector<Eigen::VectorXd> qp_r;

  int n_agents() const { return static_cast<int>(agents.size()); }
};

// Exchangeable constraint payload for the common-cost algorithms. All
// polyhedral kinds carry rows A x <= b; Disk carries center/radius.
struct ConstraintDescriptor {
  enum class Kind { Halfspaces, Cone, Box, SvmSample, EpigraphCap, Disk };
  Kind kind = Kind::Halfspaces;
  Eigen::MatrixXd A;  // rows (empty for Disk)
  Eigen::VectorXd b;
  Eigen::VectorXd center;  // Disk
  double radius = 0.0;     // Disk
  int origin = -1;         // agent id of the initial owner; -1 = box
  // SvmSample payload, kept so messages carry the sample, not its rows
  Eigen::VectorXd sample;
  double label = 0.0;

  bool is_disk() const { return kind == Kind::Disk; }
};

// min c'x (or 1/2 x'P x + q'x), x in intersection of the X_i.
struct CommonCostProblem {
  int d = 0;
  Eigen::VectorXd c;  // linear cost; empty when quadratic cost is set
  Eigen::MatrixXd cost_P;  // optional quadratic cost 1/2 x'P x + c'x
  std::vector<std::vector<ConstraintDescriptor>> agent_sets;
  double box_radius = 0.0;  // artificial bounding box |x_i| <= M
  std::string family;
  std::uint64_t seed = 0;

  int n_agents() const { return static_cast<int>(agent_sets.size()); }
  bool quadratic_cost() const { return cost_P.size() > 0; }
};

// One agent of a constraint-coupled problem. The local QP is stated over
// (x_i, aux) with aux = epigraph auxiliaries; coupling rows are affine:
// g_i(x) = G [x; aux] + h, component-wise convex by construction.
struct AgentPiece {
  int d = 0;      // decision dimension d_i (first d variables of `local`)
  int n_aux = 0;  // epigraph auxiliaries appended after the decision block
  QpProblem local;       // objective = f_i (epigraph form), rows = X_i
  Eigen::MatrixXd G;     // S x (d + n_aux)
  Eigen::VectorXd h;     // S
  double bound_radius = 0.0;  // compactness radius of X_i
  FunctionOracle f;      // f_i over the decision block only (metrics)

  Eigen::VectorXd g(const Eigen::VectorXd& x_full) const { return G * x_full + h; }
};

// min sum_i f_i(x_i)  s.t.  x_i in X_i,  sum_i g_i(x_i) <= 0.
struct ConstraintCoupledProblem {
  int S = 0;
  std::vector<AgentPiece> agents;
  // Strictly feasible per-agent points (full x+aux coordinates) when the
  // instance admits them; paired-inequality couplings (equalities split in
  // two) cannot have one and leave this empty.
  std::vector<Eigen::VectorXd> slater;
  std::string family;
  std::uint64_t seed = 0;

  int n_agents() const { return static_cast<int>(agents.size()); }
};

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

// f_i(x) = ||D_i x - b_i||^2 + (rho/N)||x||_1 with Gaussian D_i (n_i x d), b_i.
CostCoupledProblem make_lasso(int N, int n_i, int d, double rho,
                              std::uint64_t seed);

// Regularized logistic regression: decision (w, b) of dimension d+1,
// f_i(w,b) = sum_j log(1 + exp(-(w'p_ij + b) l_ij)) + (C/2N)||w||^2.
// Samples are Gaussian with zero mean and variance 2 per coordinate,
// labels are fair coin flips.
CostCoupledProblem make_logistic(int N, int m_i, int d, double C,
                                 std::uint64_t seed);

struct SoftSvmOptions {
  double C = 100.0;
  double box_radius = 10.0;
  Eigen::VectorXd mean_pos;  // defaults: 0
  Eigen::VectorXd mean_neg;  // defaults: (3, 2, 0, ...)
};

// Soft-margin SVM, one labeled sample per agent. Decision (w, b, xi) of
// dimension d+1+N; cost 1/2 w'w + C sum_i xi_i; agent i holds
// l_i (w'p_i + b) >= 1 - xi_i and xi_i >= 0.
CommonCostProblem make_soft_svm(int N, int d, const SoftSvmOptions& opt,
                                std::uint64_t seed);

// Linear assignment relaxation: agent i picks a task distribution
// x_i in the simplex restricted to allowed(i); coupling sum_i x_i = 1
// encoded as paired inequalities (S = 2N). Throws when no perfect
// matching exists over the allowed pairs.
ConstraintCoupledProblem make_task_assignment(
    const std::vector<std::vector<int>>& allowed,
    const Eigen::MatrixXd& costs, std::uint64_t seed);

struct MicrogridOptions {
  int horizon = 12;  // slots s = 0..horizon
  // Generators: p_lo <= p^s <= p_hi, ramp r_lo <= p^{s+1}-p^s <= r_hi,
  // cost a1 p + a2 p^2 per slot.
  double gen_p_lo = 0.0, gen_p_hi = 0.002;
  double gen_r_lo = -0.001, gen_r_hi = 0.001;
  double gen_a1 = 1e-4, gen_a2 = 0.025;
  // Storage: -dis <= p^s <= ch, charge q^{s+1} = q^s + p^s in [0, q_max].
  double stor_dis = 5e-4, stor_ch = 5e-4, stor_q0 = 1e-3, stor_q_max = 2e-3;
  // Controllable loads: -P <= p <= P, cost beta * max(0, p_des - p).
  double conl_P = 1e-4, conl_p_des = -5e-5, conl_beta = 2e-3;
  // Trade node: |p| <= E, cost -c1 p + c2 |p|.
  double tr_E = 2e-4, tr_c1 = 8e-4, tr_c2 = 1.6e-3;
  // Power demand per slot; empty selects the built-in profile
  // D^s = 0.003 + 0.0005 sin(pi s / 6).
  Eigen::VectorXd demand;
};

// Multi-device economic dispatch: generation positive, consumption
// negative; coupling rows require sum of injections >= D^s every slot.
// Verifies strict feasibility with an LP and throws with a certificate
// when demand cannot be met.
ConstraintCoupledProblem make_microgrid(int n_gen, int n_stor, int n_conl,
                                        const MicrogridOptions& opt,
                                        std::uint64_t seed);

struct SensorSpec {
  enum class Kind { Disk, Cone, Quadrant } kind = Kind::Disk;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();  // Disk center / apex
  double radius = 1.0;                               // Disk
  Eigen::MatrixXd rows;  // Cone: 3 rows, Quadrant: 2 rows (A x <= b)
  Eigen::VectorXd rhs;
};

// Bounding-box face problem: minimize +-e1/+-e2 over the intersection of
// 2-D sensing sets. `axis` in {0,1}, `positive` picks the sign.
CommonCostProblem make_target_localization(const std::vector<SensorSpec>& sensors,
                                           int axis, bool positive,
                                           double box_radius = 10.0);

// f_i(x) = x'Q_i x + r_i'x, Q_i = U diag(lambda) U' with lambda uniform in
// eig_range and U a random orthogonal matrix; r_i standard normal.
CostCoupledProblem make_random_qp(int N, int d, double eig_lo, double eig_hi,
                                  std::uint64_t seed);

// Rows-and-rhs view of a descriptor for LP-based solvers; throws for disks.
void descriptor_rows(const ConstraintDescriptor& desc, Eigen::MatrixXd* A,
                     Eigen::VectorXd* b);

// Membership test for one descriptor.
bool descriptor_contains(const ConstraintDescriptor& desc,
                         const Eigen::VectorXd& x, double tol = 1e-9);

}  // namespace dopt

#endif  // DOPT_PROBLEMS_HPP
