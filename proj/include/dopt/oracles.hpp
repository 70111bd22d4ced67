#ifndef DOPT_ORACLES_HPP
#define DOPT_ORACLES_HPP

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <optional>

#include "dopt/qp.hpp"

namespace dopt {

// Exact reformulation of min_{x in X_i} f_i(x) as a dense QP over
// (x, aux): nonsmooth pieces (hinge, absolute value) become epigraph
// auxiliaries, and the local constraint set is baked into the rows. The
// first `dim` variables of the model are the decision vector itself.
struct ArgminModel {
  QpProblem model;
  int n_aux = 0;
};

// Convex local cost oracle. `subgradient` returns the gradient when
// `smooth` is set; at kinks it returns the zero element of the
// subdifferential when available, else the interval midpoint.
struct FunctionOracle {
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> subgradient;
  bool smooth = false;
  double lipschitz = std::numeric_limits<double>::quiet_NaN();  // gradient L
  double strong_convexity = 0.0;                                // alpha
  // Optional quadratic form f(x) = 1/2 x'P x + q'x + c0 for closed-form
  // argmin paths (P, q empty otherwise).
  bool has_quadratic = false;
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  double c0 = 0.0;
  // Optional proximal map argmin_y f(y) + 1/(2t) ||y - z||^2.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> prox;
  // Optional exact epigraph QP for argmin-based updates.
  std::optional<ArgminModel> argmin_model;
};

// Closed convex constraint set with membership and Euclidean projection.
// Polyhedral sets additionally expose rows A x <= b, E x = f so QP-based
// solvers can handle them directly.
struct SetOracle {
  bool whole_space = true;
  std::function<bool(const Eigen::VectorXd&)> contains;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> project;
  double bound_radius = std::numeric_limits<double>::infinity();
  bool polyhedral = false;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd E;
  Eigen::VectorXd f;

  static SetOracle unconstrained() {
    SetOracle s;
    s.contains = [](const Eigen::VectorXd&) { return true; };
    s.project = [](const Eigen::VectorXd& x) { return x; };
    return s;
  }
  static SetOracle box(int d, double radius);         // |x_i| <= radius
  static SetOracle polyhedron(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const Eigen::MatrixXd& E = Eigen::MatrixXd(),
                              const Eigen::VectorXd& f = Eigen::VectorXd());
};

}  // namespace dopt

#endif  // DOPT_ORACLES_HPP
