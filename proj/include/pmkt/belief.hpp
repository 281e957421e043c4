#pragma once

#include "pmkt/rng.hpp"

namespace pmkt {

// Normal distribution clamped to the unit interval: out-of-range mass becomes
// point masses at 0 and 1. The location parameter may lie outside [0,1].
class BeliefDistribution {
 public:
  BeliefDistribution(double mu, double sigma);

  double mu() const { return mu_; }
  double sigma() const { return sigma_; }

  // Right-continuous cdf on [0,1]; cdf(1) == 1 by the atom at 1.
  double cdf(double x) const;
  double mass_at_zero() const;
  double mass_at_one() const;
  // Continuous part of the density on (0,1); zero elsewhere.
  double density(double x) const;

  double sample(Rng& rng) const;

 private:
  double mu_;
  double sigma_;
};

}  // namespace pmkt
