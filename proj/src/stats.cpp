#include "pmkt/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace pmkt {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
}  // namespace

double normal_pdf(double z) { return std::exp(-0.5 * z * z - kLogSqrt2Pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / kSqrt2); }

double normal_log_cdf(double z) {
  if (z > 0.0) {
    // log(1 - sf) with sf <= 1/2: no cancellation
    return std::log1p(-normal_sf(z));
  }
  if (z > -36.0) {
    return std::log(normal_cdf(z));  // erfc stays above DBL_MIN here
  }
  // Mills-ratio asymptotic expansion; relative error < 1e-12 for z <= -36
  const double zz = z * z;
  const double series = 1.0 - 1.0 / zz * (1.0 - 3.0 / zz * (1.0 - 5.0 / zz * (1.0 - 7.0 / zz)));
  return -0.5 * zz - kLogSqrt2Pi - std::log(-z) + std::log(series);
}

double normal_log_sf(double z) { return normal_log_cdf(-z); }

double logit(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("logit: argument must lie in (0,1)");
  return std::log(p / (1.0 - p));
}

double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace pmkt
