#include "pmkt/utility.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pmkt {

namespace {

void check_price(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("price must lie in (0,1), got " + std::to_string(q));
  }
}

void check_risk(double lambda) {
  if (!std::isfinite(lambda) || std::fabs(lambda) > kMaxAbsRisk) {
    throw std::invalid_argument("risk parameter out of range: " + std::to_string(lambda));
  }
}

// Monotone-in-q bisection shared by the two threshold inverses.
template <typename F>
double invert_increasing(F f, double target) {
  double lo = 1e-12, hi = 1.0 - 1e-12;
  if (target <= f(lo)) return lo;
  if (target >= f(hi)) return hi;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double double_relativity_utility(double x, double lambda, const LotteryFrame& frame) {
  check_risk(lambda);
  if (!(frame.worst < frame.budget && frame.budget < frame.best)) {
    throw std::invalid_argument("lottery frame requires worst < budget < best");
  }
  if (x < frame.worst || x > frame.best) {
    throw std::invalid_argument("outcome outside the lottery range");
  }
  const double span = frame.best - frame.worst;
  if (lambda == 0.0) return (x - frame.worst) / (frame.budget - frame.worst);
  return std::expm1(-lambda * (x - frame.worst) / span) /
         std::expm1(-lambda * (frame.budget - frame.worst) / span);
}

ThresholdPair censoring_thresholds(double lambda, double q) {
  check_price(q);
  check_risk(lambda);
  if (lambda == 0.0) return {q, q};
  return {std::expm1(-lambda * q) / std::expm1(-lambda),
          std::expm1(lambda * q) / std::expm1(lambda)};
}

double buy_threshold(double lambda, double q) { return censoring_thresholds(lambda, q).buy; }

double sell_threshold(double lambda, double q) { return censoring_thresholds(lambda, q).sell; }

double buy_threshold_inverse(double lambda, double belief) {
  return invert_increasing([lambda](double q) { return buy_threshold(lambda, q); }, belief);
}

double sell_threshold_inverse(double lambda, double belief) {
  return invert_increasing([lambda](double q) { return sell_threshold(lambda, q); }, belief);
}

UtilityPair expected_utilities(double pi, double q, double lambda) {
  if (!(pi >= 0.0 && pi <= 1.0)) throw std::invalid_argument("belief must lie in [0,1]");
  const ThresholdPair t = censoring_thresholds(lambda, q);
  return {pi / t.buy, (1.0 - pi) / (1.0 - t.sell)};
}

CensorResult censor_tests(double pi, double q, double lambda) {
  if (!(pi >= 0.0 && pi <= 1.0)) throw std::invalid_argument("belief must lie in [0,1]");
  const ThresholdPair t = censoring_thresholds(lambda, q);
  return {pi > t.buy, pi < t.sell};
}

double indifference_belief(double q, double lambda) {
  const ThresholdPair t = censoring_thresholds(lambda, q);
  return t.buy / (t.buy + 1.0 - t.sell);
}

InformationValues information_values(double q, double eta, double xi) {
  check_price(q);
  if (q + eta < 0.0 || q + eta > 1.0) {
    throw std::invalid_argument("belief shift eta must keep q + eta in [0,1]");
  }
  if (xi < 0.0 || xi >= 1.0 - q) {
    throw std::invalid_argument("residual shift xi must lie in [0, 1-q)");
  }
  const double buy_value = 1.0 + eta / q;
  const double sell_value = 1.0 - xi / (1.0 - q);
  return {buy_value, sell_value, std::log2(buy_value), std::log2(sell_value)};
}

}  // namespace pmkt
