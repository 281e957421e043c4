#include "pmkt/belief.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pmkt/stats.hpp"

namespace pmkt {

namespace {
constexpr double kSigmaFloor = 1e-6;
}

BeliefDistribution::BeliefDistribution(double mu, double sigma)
    : mu_(mu), sigma_(std::max(sigma, kSigmaFloor)) {
  if (!std::isfinite(mu) || !std::isfinite(sigma)) {
    throw std::invalid_argument("belief parameters must be finite");
  }
}

double BeliefDistribution::cdf(double x) const {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("cdf argument outside [0,1]");
  if (x == 1.0) return 1.0;
  return normal_cdf((x - mu_) / sigma_);
}

double BeliefDistribution::mass_at_zero() const { return normal_cdf(-mu_ / sigma_); }

double BeliefDistribution::mass_at_one() const { return normal_sf((1.0 - mu_) / sigma_); }

double BeliefDistribution::density(double x) const {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return normal_pdf((x - mu_) / sigma_) / sigma_;
}

double BeliefDistribution::sample(Rng& rng) const {
  return std::clamp(rng.normal(mu_, sigma_), 0.0, 1.0);
}

}  // namespace pmkt
