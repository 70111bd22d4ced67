#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "dopt/consensus.hpp"
#include "dopt/graph.hpp"
#include "dopt/localsolve.hpp"
#include "dopt/primal.hpp"
#include "dopt/problems.hpp"

using namespace dopt;

namespace {

FunctionOracle scalar_parabola(double center) {
  FunctionOracle f;
  f.dim = 1;
  f.smooth = true;
  f.lipschitz = 2.0;
  f.value = [center](const Eigen::VectorXd& x) {
    return (x(0) - center) * (x(0) - center);
  };
  f.subgradient = [center](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, 2 * (x(0) - center));
  };
  return f;
}

const Eigen::VectorXd kHalfRow = (Eigen::VectorXd(2) << 0.5, 0.5).finished();

}  // namespace

TEST_CASE("single-agent subgradient step is centralized descent") {
  const FunctionOracle f = scalar_parabola(1.0);
  SubgradientAgentState s{Eigen::VectorXd::Constant(1, 3.0)};
  const Eigen::VectorXd one_row = Eigen::VectorXd::Ones(1);
  for (int t = 0; t < 5; ++t) {
    const SubgradientAgentState next = dsg_step(s, {s.x}, one_row, f, 0.1);
    const double expected = s.x(0) - 0.1 * 2 * (s.x(0) - 1.0);
    CHECK(next.x(0) == expected);  // bitwise: mixing with weight 1 is identity
    s = next;
  }
}

TEST_CASE("zero step size reduces the subgradient step to mixing") {
  const FunctionOracle f = scalar_parabola(0.0);
  SubgradientAgentState a{Eigen::VectorXd::Constant(1, 2.0)};
  SubgradientAgentState b{Eigen::VectorXd::Constant(1, -4.0)};
  const SubgradientAgentState na = dsg_step(a, {a.x, b.x}, kHalfRow, f, 0.0);
  CHECK(na.x(0) == -1.0);  // exactly the average
}

TEST_CASE("K2 subgradient round matches hand arithmetic") {
  // f_0 = (x-1)^2, f_1 = (x+1)^2, start 0, gamma 0.1: mixed point 0 for
  // both, so x_0 = 0.2 and x_1 = -0.2 after one round.
  const FunctionOracle f0 = scalar_parabola(1.0);
  const FunctionOracle f1 = scalar_parabola(-1.0);
  SubgradientAgentState s0{Eigen::VectorXd::Zero(1)};
  SubgradientAgentState s1{Eigen::VectorXd::Zero(1)};
  const SubgradientAgentState n0 = dsg_step(s0, {s0.x, s1.x}, kHalfRow, f0, 0.1);
  const SubgradientAgentState n1 = dsg_step(s1, {s0.x, s1.x}, kHalfRow, f1, 0.1);
  CHECK(n0.x(0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(n1.x(0) == doctest::Approx(-0.2).epsilon(1e-15));
}

TEST_CASE("single-agent tracking is plain gradient descent") {
  const FunctionOracle f = scalar_parabola(2.0);
  TrackingAgentState s = gt_init(Eigen::VectorXd::Zero(1), f);
  CHECK(s.y(0) == -4.0);
  const Eigen::VectorXd one_row = Eigen::VectorXd::Ones(1);
  double x = 0.0;
  for (int t = 0; t < 10; ++t) {
    s = gt_step(s, {s.x}, {s.y}, one_row, f, 0.2);
    x = x - 0.2 * 2 * (x - 2.0);
    CHECK(s.x(0) == doctest::Approx(x).epsilon(1e-15));
    CHECK(s.y(0) == doctest::Approx(2 * (x - 2.0)).epsilon(1e-14));
  }
}

TEST_CASE("two hand-rolled tracking rounds on K2") {
  const FunctionOracle f0 = scalar_parabola(1.0);
  const FunctionOracle f1 = scalar_parabola(-1.0);
  TrackingAgentState s0 = gt_init(Eigen::VectorXd::Zero(1), f0);
  TrackingAgentState s1 = gt_init(Eigen::VectorXd::Zero(1), f1);
  CHECK(s0.y(0) == -2.0);
  CHECK(s1.y(0) == 2.0);
  auto round = [&](double gamma) {
    const TrackingAgentState n0 =
        gt_step(s0, {s0.x, s1.x}, {s0.y, s1.y}, kHalfRow, f0, gamma);
    const TrackingAgentState n1 =
        gt_step(s1, {s0.x, s1.x}, {s0.y, s1.y}, kHalfRow, f1, gamma);
    s0 = n0;
    s1 = n1;
  };
  round(0.25);
  CHECK(s0.x(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s1.x(0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(s0.y(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s1.y(0) == doctest::Approx(-1.0).epsilon(1e-15));
  round(0.25);
  CHECK(s0.x(0) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(s1.x(0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(s0.y(0) == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(s1.y(0) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("tracker conserves the running gradient average") {
  const CostCoupledProblem prob = make_random_qp(8, 3, 1.0, 5.0, 44);
  const CommGraph g = erdos_renyi_graph(8, 0.4, 45, false,
                                        ConnectivityRequirement::Connected);
  PrimalRunOptions opt;
  opt.algorithm = PrimalAlgorithm::Gt;
  opt.schedule = StepSchedule::constant(0.01);
  opt.rounds = 300;
  opt.reference = centralized_reference_solve(prob);
  opt.observer = [&](long, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
    Eigen::RowVectorXd gbar = Eigen::RowVectorXd::Zero(3);
    for (int i = 0; i < 8; ++i)
      gbar += prob.agents[i].subgradient(X.row(i).transpose()).transpose();
    gbar /= 8.0;
    const Eigen::RowVectorXd ybar = Y.colwise().mean();
    const double denom = std::max(1.0, gbar.norm());
    CHECK((ybar - gbar).norm() / denom < 1e-10);
  };
  run_primal(prob, metropolis_hastings_weights(g), opt);
}

TEST_CASE("both methods move the network average like a centralized step") {
  const CostCoupledProblem prob = make_random_qp(6, 2, 1.0, 4.0, 50);
  const CommGraph g = erdos_renyi_graph(6, 0.5, 51, false,
                                        ConnectivityRequirement::Connected);
  const WeightMatrix w = metropolis_hastings_weights(g);
  const SolveReport ref = centralized_reference_solve(prob);

  // Subgradient method: xbar^{t+1} = xbar^t - gamma_t * mean grad(A x^t).
  {
    PrimalRunOptions opt;
    opt.schedule = StepSchedule::constant(0.02);
    opt.rounds = 100;
    opt.reference = ref;
    Eigen::MatrixXd prev;
    opt.observer = [&](long t, const Eigen::MatrixXd& X, const Eigen::MatrixXd&) {
      if (t > 0) {
        const Eigen::MatrixXd V = w.a * prev;
        Eigen::RowVectorXd gbar = Eigen::RowVectorXd::Zero(2);
        for (int i = 0; i < 6; ++i)
          gbar += prob.agents[i].subgradient(V.row(i).transpose()).transpose();
        gbar /= 6.0;
        const Eigen::RowVectorXd want = prev.colwise().mean() - 0.02 * gbar;
        CHECK((X.colwise().mean() - want).cwiseAbs().maxCoeff() < 1e-12);
      }
      prev = X;
    };
    run_primal(prob, w, opt);
  }

  // Tracking: xbar^{t+1} = xbar^t - gamma * ybar^t.
  {
    PrimalRunOptions opt;
    opt.algorithm = PrimalAlgorithm::Gt;
    opt.schedule = StepSchedule::constant(0.02);
    opt.rounds = 100;
    opt.reference = ref;
    Eigen::MatrixXd prev_x, prev_y;
    opt.observer = [&](long t, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
      if (t > 0) {
        const Eigen::RowVectorXd want =
            prev_x.colwise().mean() - 0.02 * prev_y.colwise().mean();
        CHECK((X.colwise().mean() - want).cwiseAbs().maxCoeff() < 1e-12);
      }
      prev_x = X;
      prev_y = Y;
    };
    run_primal(prob, w, opt);
  }
}

TEST_CASE("zero schedule reduces the full run to average consensus") {
  const CostCoupledProblem prob = make_random_qp(5, 2, 1.0, 3.0, 60);
  const CommGraph g = erdos_renyi_graph(5, 0.6, 61, false,
                                        ConnectivityRequirement::Connected);
  const WeightMatrix w = metropolis_hastings_weights(g);
  PrimalRunOptions opt;
  opt.schedule = StepSchedule::constant(0.0);
  opt.rounds = 10;
  opt.init.kind = InitPolicy::Kind::Gaussian;
  opt.init.seed = 3;
  opt.reference = centralized_reference_solve(prob);
  ConsensusState cs;
  bool first = true;
  opt.observer = [&](long t, const Eigen::MatrixXd& X, const Eigen::MatrixXd&) {
    if (first) {
      cs.z = X;
      first = false;
      return;
    }
    cs = average_consensus_step(cs, w);
    CHECK(cs.z == X);  // bitwise
  };
  run_primal(prob, w, opt);
}

TEST_CASE("mixing contracts the stacked deviation every round") {
  const CostCoupledProblem prob = make_random_qp(7, 2, 1.0, 3.0, 70);
  const CommGraph g = erdos_renyi_graph(7, 0.5, 71, false,
                                        ConnectivityRequirement::Connected);
  const WeightMatrix w = metropolis_hastings_weights(g);
  const double sigma = contraction_factor(w);
  PrimalRunOptions opt;
  opt.schedule = StepSchedule::constant(0.0);
  opt.rounds = 40;
  opt.init.kind = InitPolicy::Kind::Gaussian;
  opt.init.seed = 5;
  opt.reference = centralized_reference_solve(prob);
  double prev_dev = -1.0;
  opt.observer = [&](long, const Eigen::MatrixXd& X, const Eigen::MatrixXd&) {
    const Eigen::MatrixXd dev =
        X - Eigen::VectorXd::Ones(7) * X.colwise().mean();
    const double norm = dev.norm();
    if (prev_dev >= 0.0) CHECK(norm <= sigma * prev_dev + 1e-12);
    prev_dev = norm;
  };
  run_primal(prob, w, opt);
}

TEST_CASE("tracking outruns the subgradient method on a smooth problem") {
  const CostCoupledProblem prob = make_random_qp(6, 3, 1.0, 5.0, 80);
  const CommGraph g = erdos_renyi_graph(6, 0.5, 81, false,
                                        ConnectivityRequirement::Connected);
  const WeightMatrix w = metropolis_hastings_weights(g);
  const SolveReport ref = centralized_reference_solve(prob);

  PrimalRunOptions gt;
  gt.algorithm = PrimalAlgorithm::Gt;
  gt.schedule = StepSchedule::constant(0.01);
  gt.rounds = 2000;
  gt.reference = ref;
  const PrimalRunResult rg = run_primal(prob, w, gt);

  PrimalRunOptions ds;
  ds.schedule = StepSchedule::power(0.1, 0.7);
  ds.rounds = 2000;
  ds.reference = ref;
  const PrimalRunResult rd = run_primal(prob, w, ds);

  const double gt_err = rg.trace.last("cost_error");
  const double ds_err = rd.trace.last("cost_error");
  CHECK(gt_err < 1e-8 * std::abs(ref.value));
  CHECK(gt_err < ds_err);
  CHECK(rg.trace.last("consensus_error") < 1e-8);
}
