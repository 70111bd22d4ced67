#ifndef DOPT_RNG_HPP
#define DOPT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace dopt {

// Seeded RNG with hand-rolled distributions. std::mt19937_64 is the engine;
// the uniform/normal transforms are spelled out here because the standard
// library distribution adapters are implementation-defined, which would break
// replayability of recorded traces across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (one value per call; the sibling draw is
  // discarded to keep the stream position independent of call pairing).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  bool bernoulli(double p) { return uniform() < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dopt

#endif  // DOPT_RNG_HPP
