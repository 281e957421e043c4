#include "pmkt/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pmkt/belief.hpp"
#include "pmkt/stats.hpp"
#include "pmkt/utility.hpp"

namespace pmkt {

RhoPair rho_pair(const RhoLogitParams& params, double q) {
  if (!(params.buy_slope > 0.0) || !(params.sell_slope < 0.0)) {
    throw std::invalid_argument("rho_buy must increase and rho_sell decrease in price");
  }
  const double x = logit(q);
  return {expit(params.buy_slope * (x - params.buy_center)),
          expit(params.sell_slope * (x - params.sell_center))};
}

VoteSide classify_vote(double pi, double q, double lambda, const FlowPriceState& state,
                       double rho_buy, double rho_sell, Rng& rng) {
  if (!(pi >= 0.0 && pi <= 1.0)) throw std::invalid_argument("belief must lie in [0,1]");
  const ThresholdPair t = censoring_thresholds(lambda, q);
  if (pi >= t.sell) return VoteSide::Buy;
  if (pi <= t.buy) return VoteSide::Sell;

  // inside the equilibrium zone: the deficit side is sure to match
  const double match_buy = state.demand >= state.supply ? rho_buy : 1.0;
  const double match_sell = state.supply >= state.demand ? rho_sell : 1.0;
  const double value_buy = match_buy * (pi / t.buy) + (1.0 - match_buy);
  const double value_sell = match_sell * ((1.0 - pi) / (1.0 - t.sell)) + (1.0 - match_sell);
  if (value_buy > value_sell) return VoteSide::Buy;
  if (value_sell > value_buy) return VoteSide::Sell;

  const double diff_if_buy = std::fabs(state.demand + 1.0 / q - state.supply);
  const double diff_if_sell = std::fabs(state.demand - (state.supply + 1.0 / (1.0 - q)));
  if (diff_if_buy < diff_if_sell) return VoteSide::Buy;
  if (diff_if_sell < diff_if_buy) return VoteSide::Sell;
  return rng.bernoulli(0.5) ? VoteSide::Buy : VoteSide::Sell;
}

void apply_vote(FlowPriceState& state, VoteSide side, double q) {
  if (side == VoteSide::Buy) {
    state.buy_votes += 1.0;
    state.demand += 1.0 / q;
  } else {
    state.sell_votes += 1.0;
    state.supply += 1.0 / (1.0 - q);
  }
}

FlowTrajectory simulate_single_price(const SinglePriceConfig& config) {
  if (config.votes < 0) throw std::invalid_argument("vote budget must be nonnegative");
  if (!(config.price > 0.0 && config.price < 1.0)) {
    throw std::invalid_argument("price must lie in (0,1)");
  }
  const BeliefDistribution beliefs(config.mu, config.sigma);
  Rng rng(config.seed);
  FlowTrajectory out;
  out.demand_minus_supply.reserve(config.votes);
  for (long k = 0; k < config.votes; ++k) {
    const double pi = beliefs.sample(rng);
    const VoteSide side = classify_vote(pi, config.price, config.lambda, out.final_state,
                                        config.rho_buy, config.rho_sell, rng);
    apply_vote(out.final_state, side, config.price);
    out.demand_minus_supply.push_back(out.final_state.demand - out.final_state.supply);
  }
  return out;
}

VolumeSnapshot simulate_book(const BookRunConfig& config) {
  if (config.prices.size() != config.counts.size()) {
    throw std::invalid_argument("one vote count per price required");
  }
  const BeliefDistribution beliefs(config.mu, config.sigma);
  Rng rng(config.seed);

  VolumeSnapshot snap;
  snap.time = 0;
  snap.prices = config.prices;
  snap.buy_votes.assign(config.prices.size(), 0.0);
  snap.sell_votes.assign(config.prices.size(), 0.0);

  for (std::size_t i = 0; i < config.prices.size(); ++i) {
    const double q = config.prices[i];
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("price must lie in (0,1)");
    if (config.counts[i] < 0) throw std::invalid_argument("vote counts must be nonnegative");
    const RhoPair rho = rho_pair(config.rho, q);
    FlowPriceState state;
    for (long k = 0; k < config.counts[i]; ++k) {
      const double pi = beliefs.sample(rng);
      const VoteSide side = classify_vote(pi, q, config.lambda, state, rho.buy, rho.sell, rng);
      apply_vote(state, side, q);
    }
    snap.buy_votes[i] = state.buy_votes;
    snap.sell_votes[i] = state.sell_votes;
  }
  return snap;
}

}  // namespace pmkt
