#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmkt/belief.hpp"
#include "pmkt/estimator.hpp"
#include "pmkt/flow.hpp"
#include "pmkt/market.hpp"
#include "pmkt/rng.hpp"
#include "pmkt/stats.hpp"
#include "pmkt/utility.hpp"

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
  return std::string(PMKT_FIXTURES_DIR) + "/" + name;
}

// Regularized lower incomplete gamma P(a,x); series for x < a+1, continued
// fraction otherwise.
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p domain");
  if (x == 0.0) return 0.0;
  const double log_gamma_a = std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma_a);
  }
  // Lentz continued fraction for Q(a,x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  const double q = std::exp(-x + a * std::log(x) - log_gamma_a) * h;
  return 1.0 - q;
}

inline double chi2_cdf(double x, int df) { return gamma_p(df / 2.0, x / 2.0); }

inline double chi2_quantile(double p, int df) {
  double lo = 0.0, hi = 10.0 * df + 100.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi2_cdf(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Self-simulation setup for recovery experiments. The price grid is built in
// threshold space so that both censoring transitions are densely covered:
// 14 prices whose sell threshold spans mu-5s..mu+1.5s, 14 whose buy threshold
// spans mu-1.5s..mu+5s, and 11 across the zone in between. Matching curves are
// steep logits centered at the median price.
struct RecoveryFixture {
  double lambda = 0.0;
  std::vector<double> prices;
  std::vector<long> counts;
  pmkt::RhoLogitParams rho;
};

inline RecoveryFixture make_recovery_fixture(double mu, double sigma, long total_votes) {
  RecoveryFixture fx;
  fx.lambda = pmkt::equilibrium_lambda(mu, sigma);

  std::vector<double> prices;
  const auto clamp_belief = [](double b) { return std::clamp(b, 0.002, 0.998); };
  const int per_side = 14;
  for (int i = 0; i < per_side; ++i) {
    const double f = static_cast<double>(i) / (per_side - 1);
    prices.push_back(pmkt::sell_threshold_inverse(
        fx.lambda, clamp_belief(mu + (-5.0 + 6.5 * f) * sigma)));
    prices.push_back(pmkt::buy_threshold_inverse(
        fx.lambda, clamp_belief(mu + (-1.5 + 6.5 * f) * sigma)));
  }
  // zone interior between the highest sell-transition price and the lowest
  // buy-transition price
  const double lo = pmkt::sell_threshold_inverse(fx.lambda, clamp_belief(mu + 1.5 * sigma));
  const double hi = pmkt::buy_threshold_inverse(fx.lambda, clamp_belief(mu - 1.5 * sigma));
  if (lo < hi) {
    for (int i = 1; i <= 11; ++i) {
      prices.push_back(lo + (hi - lo) * i / 12.0);
    }
  }
  for (double& q : prices) q = std::clamp(q, 1e-4, 1.0 - 1e-4);
  std::sort(prices.begin(), prices.end());
  std::vector<double> unique_prices;
  for (double q : prices) {
    if (unique_prices.empty() || q > unique_prices.back() + 1e-12) unique_prices.push_back(q);
  }
  fx.prices = std::move(unique_prices);
  fx.counts.assign(fx.prices.size(), total_votes / static_cast<long>(fx.prices.size()));

  const double center = pmkt::logit(mu);
  fx.rho = {64.0, center, -64.0, center};
  return fx;
}

inline pmkt::VolumeSnapshot simulate_recovery_snapshot(double mu, double sigma,
                                                       const RecoveryFixture& fx,
                                                       std::uint64_t seed) {
  pmkt::BookRunConfig cfg;
  cfg.mu = mu;
  cfg.sigma = sigma;
  cfg.lambda = fx.lambda;
  cfg.prices = fx.prices;
  cfg.counts = fx.counts;
  cfg.rho = fx.rho;
  cfg.seed = seed;
  return pmkt::simulate_book(cfg);
}

// Interleaved vote stream over the whole grid, with cumulative snapshots every
// `snapshot_every` votes. Draw order: one pre-pass shuffling the price
// schedule, then per vote one belief draw plus at most one tie-break.
inline std::vector<pmkt::VolumeSnapshot> simulate_stream(double mu, double sigma,
                                                         const RecoveryFixture& fx,
                                                         std::uint64_t seed,
                                                         long snapshot_every) {
  pmkt::Rng rng(seed);
  std::vector<std::size_t> schedule;
  for (std::size_t i = 0; i < fx.prices.size(); ++i) {
    for (long k = 0; k < fx.counts[i]; ++k) schedule.push_back(i);
  }
  for (std::size_t i = schedule.size(); i-- > 1;) {
    const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
    std::swap(schedule[i], schedule[j]);
  }

  const pmkt::BeliefDistribution beliefs(mu, sigma);
  std::vector<pmkt::FlowPriceState> states(fx.prices.size());
  std::vector<pmkt::VolumeSnapshot> snaps;
  long placed = 0;
  for (std::size_t i : schedule) {
    const double q = fx.prices[i];
    const pmkt::RhoPair rho = pmkt::rho_pair(fx.rho, q);
    const double pi = beliefs.sample(rng);
    const pmkt::VoteSide side =
        pmkt::classify_vote(pi, q, fx.lambda, states[i], rho.buy, rho.sell, rng);
    pmkt::apply_vote(states[i], side, q);
    ++placed;
    if (placed % snapshot_every == 0) {
      pmkt::VolumeSnapshot snap;
      snap.time = placed;
      snap.prices = fx.prices;
      for (const auto& st : states) {
        snap.buy_votes.push_back(st.buy_votes);
        snap.sell_votes.push_back(st.sell_votes);
      }
      snaps.push_back(std::move(snap));
    }
  }
  return snaps;
}

}  // namespace testsupport
