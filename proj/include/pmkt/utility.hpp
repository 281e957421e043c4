#pragma once

namespace pmkt {

// |lambda| beyond this overflows exp() inside the threshold formulas; the
// model never needs more than single digits.
inline constexpr double kMaxAbsRisk = 700.0;

// Bounded lottery seen from a status-quo budget: worst < budget < best.
struct LotteryFrame {
  double worst;
  double budget;
  double best;
};

// Utility normalized to the lottery's [worst, best] range and rescaled so the
// status quo has utility 1. Increasing in x for every lambda; lambda = 0 is
// handled as the linear limit.
double double_relativity_utility(double x, double lambda, const LotteryFrame& frame);

struct ThresholdPair {
  double buy;   // belief above which buying at q beats inaction
  double sell;  // belief below which selling at q beats inaction
};

// Censoring thresholds for risk parameter lambda at price q in (0,1).
// For lambda < 0: buy < q < sell, and both collapse to q as lambda -> 0.
ThresholdPair censoring_thresholds(double lambda, double q);
double buy_threshold(double lambda, double q);
double sell_threshold(double lambda, double q);

// Price whose buy (resp. sell) threshold equals the given belief; inverse of
// the above in q, by bisection.
double buy_threshold_inverse(double lambda, double belief);
double sell_threshold_inverse(double lambda, double belief);

struct UtilityPair {
  double buy;   // expected utility of a fully matched buy
  double sell;  // expected utility of a fully matched sell
};

UtilityPair expected_utilities(double pi, double q, double lambda);

struct CensorResult {
  bool buy_admissible;
  bool sell_admissible;
};

// Strict admissibility tests: buy iff pi > buy threshold, sell iff pi < sell
// threshold. Both hold exactly on the open interval between the thresholds.
CensorResult censor_tests(double pi, double q, double lambda);

// Unique belief strictly between the thresholds at which a matched buy and a
// matched sell have equal expected utility.
double indifference_belief(double q, double lambda);

struct InformationValues {
  double buy_value;   // payoff ratio of acting on a belief advantage eta
  double sell_value;  // payoff ratio left after others learn xi of it
  double buy_bits;    // log2 of buy_value
  double sell_bits;   // log2 of sell_value
};

// Goal-relative values of information at price q: buy_value = 1 + eta/q,
// sell_value = 1 - xi/(1-q). These are the small-risk limits of the expected
// utilities above.
InformationValues information_values(double q, double eta, double xi);

}  // namespace pmkt
