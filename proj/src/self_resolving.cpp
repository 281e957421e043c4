#include "pmkt/self_resolving.hpp"

#include <cmath>
#include <stdexcept>

namespace pmkt {

namespace {
constexpr double kBeliefTol = 1e-12;
}

double MechanismTable::value(std::uint32_t subset) const {
  if (subset >= values.size()) throw std::invalid_argument("subset outside the signal set");
  return values[subset];
}

void MechanismTable::validate() const {
  if (signal_names.size() > 20) throw std::invalid_argument("too many signals");
  if (values.size() != (std::size_t{1} << signal_names.size())) {
    throw std::invalid_argument("mechanism must cover the whole signal powerset");
  }
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("mechanism value outside [0,1]");
  }
}

SrmResult run_srm(const SrmScenario& scenario) {
  scenario.mechanism.validate();
  const std::size_t n = scenario.expert_ids.size();
  if (scenario.endowments.size() != n || scenario.strategies.size() != n) {
    throw std::invalid_argument("expert arrays must have equal length");
  }

  std::vector<bool> participating(n, false);
  bool any_ignorant = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (scenario.endowments[i] == 0) {
      participating[i] = true;
      any_ignorant = true;
    }
  }
  if (!any_ignorant) {
    throw std::invalid_argument("at least one expert with no private signals is required");
  }

  SrmResult result;
  std::uint32_t pool = 0;
  std::vector<std::uint32_t> private_pools(n, 0);  // what a silent joiner still holds back

  const int max_rounds = static_cast<int>(n) + 1;
  for (int round = 1; round <= max_rounds; ++round) {
    const double price = scenario.mechanism.value(pool);
    result.price_trail.push_back(price);

    // a silent participant whose withheld signals still move the value breaks
    // the common-belief price rule
    for (std::size_t i = 0; i < n; ++i) {
      if (participating[i] && private_pools[i] != 0 &&
          std::fabs(scenario.mechanism.value(pool | private_pools[i]) - price) > kBeliefTol) {
        result.price_rule_violated = true;
      }
    }

    std::size_t joiner = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (participating[i]) continue;
      const double belief = scenario.mechanism.value(pool | scenario.endowments[i]);
      if (std::fabs(belief - price) > kBeliefTol) {
        joiner = i;
        break;  // lowest id wins the round
      }
    }
    if (joiner == n) {
      result.rounds = round;
      break;
    }

    const double belief = scenario.mechanism.value(pool | scenario.endowments[joiner]);
    const bool shares = scenario.strategies[joiner] == AgentStrategy::Efficient;
    result.joins.push_back({scenario.expert_ids[joiner], round, belief > price, 1.0, price, shares});
    participating[joiner] = true;
    if (shares) {
      pool |= scenario.endowments[joiner];
    } else {
      private_pools[joiner] = scenario.endowments[joiner];
    }
  }
  if (result.rounds == 0) throw std::logic_error("self-resolving run failed to terminate");

  result.final_pool = pool;
  result.final_identity = true;
  const double final_price = result.price_trail.back();
  for (std::size_t i = 0; i < n; ++i) {
    const double belief = scenario.mechanism.value(pool | scenario.endowments[i]);
    if (std::fabs(belief - final_price) > kBeliefTol) result.final_identity = false;
  }
  return result;
}

AuditResult best_response_audit(const MechanismTable& mechanism,
                                const std::vector<std::uint32_t>& endowments,
                                std::size_t deviant_index) {
  mechanism.validate();
  if (deviant_index >= endowments.size()) throw std::invalid_argument("no such expert");

  // everyone else plays Efficient; the deviant never joins on their own
  SrmScenario others;
  for (std::size_t i = 0; i < endowments.size(); ++i) {
    if (i == deviant_index) continue;
    others.expert_ids.push_back(static_cast<int>(i));
    others.endowments.push_back(endowments[i]);
    others.strategies.push_back(AgentStrategy::Efficient);
  }
  others.mechanism = mechanism;

  // replay the efficient run round by round, watching the deviant's belief
  std::uint32_t pool = 0;
  std::vector<bool> participating(others.expert_ids.size(), false);
  for (std::size_t i = 0; i < others.endowments.size(); ++i) {
    if (others.endowments[i] == 0) participating[i] = true;
  }

  AuditResult audit;
  const int max_rounds = static_cast<int>(others.expert_ids.size()) + 1;
  for (int round = 1; round <= max_rounds; ++round) {
    const double price = mechanism.value(pool);
    const double deviant_belief = mechanism.value(pool | endowments[deviant_index]);
    if (audit.join_round == 0 && std::fabs(deviant_belief - price) > kBeliefTol) {
      audit.join_round = round;
      audit.share_sign = +1;
      // Silent join: the pool is beyond the deviant's control, so the believed
      // final price equals the post-join round price, which is the mechanism
      // value of the unchanged pool. Expected profit of the one-contract
      // transaction under that belief:
      const double believed_final = mechanism.value(pool);
      const double side = deviant_belief > price ? +1.0 : -1.0;
      audit.silent_profit = side * (believed_final - price) * 1.0;
      break;
    }
    std::size_t joiner = others.expert_ids.size();
    for (std::size_t i = 0; i < others.expert_ids.size(); ++i) {
      if (participating[i]) continue;
      if (std::fabs(mechanism.value(pool | others.endowments[i]) - price) > kBeliefTol) {
        joiner = i;
        break;
      }
    }
    if (joiner == others.expert_ids.size()) break;
    participating[joiner] = true;
    pool |= others.endowments[joiner];
  }
  return audit;
}

std::vector<Payout> settle(double final_price, const std::vector<Position>& positions,
                           SettleMode mode, Rng* rng) {
  if (!(final_price >= 0.0 && final_price <= 1.0)) {
    throw std::invalid_argument("final price must lie in [0,1]");
  }
  double contract_value = final_price;
  if (mode == SettleMode::Bernoulli) {
    if (rng == nullptr) throw std::invalid_argument("Bernoulli settlement needs a generator");
    contract_value = rng->bernoulli(final_price) ? 1.0 : 0.0;
  }
  std::vector<Payout> payouts;
  payouts.reserve(positions.size());
  for (const Position& p : positions) {
    const double gross = p.contracts * contract_value;
    payouts.push_back({p.account, gross, gross - p.contracts * p.entry_price});
  }
  return payouts;
}

}  // namespace pmkt
