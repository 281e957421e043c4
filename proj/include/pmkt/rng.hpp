#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pmkt {

// Seedable generator with a fixed, documented draw order so simulation runs
// are reproducible bit-for-bit within this codebase:
//   - uniform(): one 64-bit engine step, mapped to [0,1) with 53 bits
//   - normal():  exactly two uniforms (Box-Muller, cosine branch, no caching)
//   - bernoulli(): one uniform
// std::normal_distribution is deliberately avoided; its draw sequence is
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal(double mu, double sigma) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return mu + sigma * r * std::cos(2.0 * M_PI * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pmkt
