#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pmkt/rng.hpp"

namespace pmkt {

// Shared map from subsets of named signals to the probability of the
// proposition, indexed by subset bitmask (signal i = bit i).
struct MechanismTable {
  std::vector<std::string> signal_names;
  std::vector<double> values;  // size 1 << signal_names.size()

  double value(std::uint32_t subset) const;
  void validate() const;
};

enum class AgentStrategy { Efficient, SilentDeviant };

struct SrmScenario {
  MechanismTable mechanism;
  std::vector<int> expert_ids;
  std::vector<std::uint32_t> endowments;      // one bitmask per expert
  std::vector<AgentStrategy> strategies;      // one per expert
};

struct JoinRecord {
  int expert = 0;
  int round = 0;
  bool bought = false;
  double size = 1.0;
  double price = 0.0;
  bool shared = false;
};

struct SrmResult {
  int rounds = 0;                  // final round index: nobody joins afterwards
  std::vector<double> price_trail; // round prices, one per round
  std::uint32_t final_pool = 0;
  std::vector<JoinRecord> joins;
  bool final_identity = false;     // all-Efficient runs: every belief equals the price
  bool price_rule_violated = false; // a non-sharing participant's belief differs mid-round
};

// Round-based run: the round price is the mechanism value of the public pool;
// an outsider joins when their pooled belief differs from it (lowest id
// first), buys above / sells below, and shares unless silent. Stops when no
// outsider's belief differs.
SrmResult run_srm(const SrmScenario& scenario);

struct AuditResult {
  double silent_profit = 0.0;  // expected profit of a silent join under the
                               // deviant's own final-price belief
  int share_sign = 0;          // +1 when sharing carries a belief edge, else 0
  int join_round = 0;          // 0 when the deviant never wants to join
};

// Best-response audit of one expert against everyone else playing Efficient.
AuditResult best_response_audit(const MechanismTable& mechanism,
                                const std::vector<std::uint32_t>& endowments,
                                std::size_t deviant_index);

enum class SettleMode { Expected, Bernoulli };

struct Position {
  int account = 0;        // arbitrary account id; counterparties included
  double contracts = 0.0; // signed: positive long, negative short
  double entry_price = 0.0;
};

struct Payout {
  int account = 0;
  double gross = 0.0;  // contracts * realized contract value
  double net = 0.0;    // gross minus the entry cost
};

// Resolves positions at the final price: Expected pays the price itself per
// contract; Bernoulli draws one 0/1 outcome at that probability (one draw for
// the whole settlement). Net payouts over a matched book sum to zero.
std::vector<Payout> settle(double final_price, const std::vector<Position>& positions,
                           SettleMode mode, Rng* rng);

}  // namespace pmkt
