#pragma once

#include <cstdint>
#include <vector>

#include "pmkt/market.hpp"
#include "pmkt/rng.hpp"

namespace pmkt {

// Matching-probability curves over price: rho_buy is increasing in price,
// rho_sell decreasing, both strictly inside (0,1).
struct RhoLogitParams {
  double buy_slope = 0.0;   // > 0
  double buy_center = 0.0;  // logit of the price where rho_buy = 1/2
  double sell_slope = 0.0;  // < 0
  double sell_center = 0.0;
};

struct RhoPair {
  double buy;
  double sell;
};

RhoPair rho_pair(const RhoLogitParams& params, double q);

// Running single-price book state of the vote stream.
struct FlowPriceState {
  double demand = 0.0;      // contracts bid
  double supply = 0.0;      // contracts offered
  double buy_votes = 0.0;
  double sell_votes = 0.0;
};

enum class VoteSide { Buy, Sell };

// Classifies one belief draw at price q. Outside the censoring thresholds the
// side is forced; inside, each side's matching probability is its rho value
// when that side already carries at least as many contracts as the other and
// 1 otherwise, and the side with the larger rho-blended utility wins. Ties go
// to the side that leaves demand and supply closer; exact ties consume one
// uniform draw.
VoteSide classify_vote(double pi, double q, double lambda, const FlowPriceState& state,
                       double rho_buy, double rho_sell, Rng& rng);

// Places the vote on the given side, keeping votes and contracts consistent.
void apply_vote(FlowPriceState& state, VoteSide side, double q);

struct SinglePriceConfig {
  double mu = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;  // negative
  double price = 0.0;
  double rho_buy = 0.0;
  double rho_sell = 0.0;
  long votes = 0;
  std::uint64_t seed = 0;
};

struct FlowTrajectory {
  std::vector<double> demand_minus_supply;  // after each vote
  FlowPriceState final_state;
};

// Draw order per vote: one belief sample (two uniforms), then at most one
// tie-break uniform. Deterministic per seed.
FlowTrajectory simulate_single_price(const SinglePriceConfig& config);

struct BookRunConfig {
  double mu = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;  // negative
  std::vector<double> prices;
  std::vector<long> counts;  // votes to place per price
  RhoLogitParams rho;
  std::uint64_t seed = 0;
};

// Generates each price's votes in ascending price order (prices evolve
// independently); returns the model vote volumes per price.
VolumeSnapshot simulate_book(const BookRunConfig& config);

}  // namespace pmkt
