#ifndef DOPT_SCHEDULE_HPP
#define DOPT_SCHEDULE_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dopt {

// Step-size sequence gamma^t used by the iterative algorithms.
//   Constant:  gamma^t = gamma
//   Power:     gamma^t = c * (1/t)^eps, evaluated with t <- max(t,1)
//   Harmonic:  gamma^t = 1/(t+1)
struct StepSchedule {
  enum class Kind { Constant, Power, Harmonic };
  Kind kind = Kind::Constant;
  double gamma = 1e-3;  // Constant
  double c = 1.0;       // Power scale
  double eps = 0.8;     // Power exponent

  static StepSchedule constant(double g) {
    StepSchedule s;
    s.kind = Kind::Constant;
    s.gamma = g;
    return s;
  }
  static StepSchedule power(double scale, double exponent) {
    if (exponent <= 0.0) throw std::invalid_argument("power schedule: exponent must be > 0");
    StepSchedule s;
    s.kind = Kind::Power;
    s.c = scale;
    s.eps = exponent;
    return s;
  }
  static StepSchedule harmonic() {
    StepSchedule s;
    s.kind = Kind::Harmonic;
    return s;
  }

  double at(long t) const {
    switch (kind) {
      case Kind::Constant:
        return gamma;
      case Kind::Power:
        return c * std::pow(1.0 / static_cast<double>(std::max(t, 1L)), eps);
      case Kind::Harmonic:
        return 1.0 / static_cast<double>(t + 1);
    }
    return 0.0;
  }

  // True when the sequence is square-summable but not summable, the
  // condition the diminishing-step convergence results require.
  bool diminishing() const {
    return kind == Kind::Harmonic ||
           (kind == Kind::Power && eps > 0.5 && eps <= 1.0);
  }
};

}  // namespace dopt

#endif  // DOPT_SCHEDULE_HPP
