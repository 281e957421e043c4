#include "pmkt/market.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pmkt {

namespace {
constexpr double kPriceMatchTol = 1e-9;
}

PriceGrid::PriceGrid(std::vector<double> prices) : prices_(std::move(prices)) {
  if (prices_.empty()) throw std::invalid_argument("price grid must not be empty");
  double prev = 0.0;
  for (double q : prices_) {
    if (!(q > 0.0 && q < 1.0)) {
      throw std::invalid_argument("grid price out of range: " + std::to_string(q));
    }
    if (q <= prev) throw std::invalid_argument("grid prices must be strictly increasing");
    prev = q;
  }
}

std::optional<std::size_t> PriceGrid::find(double q) const {
  auto it = std::lower_bound(prices_.begin(), prices_.end(), q - kPriceMatchTol);
  if (it == prices_.end() || std::fabs(*it - q) > kPriceMatchTol) return std::nullopt;
  return static_cast<std::size_t>(it - prices_.begin());
}

double VolumeSnapshot::total_votes() const {
  double total = 0.0;
  for (std::size_t i = 0; i < prices.size(); ++i) total += buy_votes[i] + sell_votes[i];
  return total;
}

OrderBook::OrderBook(PriceGrid grid) : grid_(std::move(grid)), levels_(grid_.size()) {}

std::size_t OrderBook::require_index(double price) const {
  auto idx = grid_.find(price);
  if (!idx) {
    throw std::invalid_argument("price " + std::to_string(price) + " is not on the grid");
  }
  return *idx;
}

void OrderBook::withdraw(std::size_t idx, const OrderEvent& order) {
  double remaining = order.size;
  for (auto queue : {&levels_[idx].bids, &levels_[idx].asks}) {
    double* total = (queue == &levels_[idx].bids) ? &levels_[idx].bid_total : &levels_[idx].ask_total;
    for (auto it = queue->begin(); it != queue->end() && remaining > 0.0;) {
      if (it->expert != order.expert) {
        ++it;
        continue;
      }
      const double take = std::min(remaining, it->size);
      it->size -= take;
      *total -= take;
      remaining -= take;
      it = (it->size <= 0.0) ? queue->erase(it) : std::next(it);
    }
  }
}

std::vector<Trade> OrderBook::apply(const OrderEvent& order) {
  if (!(order.size > 0.0)) throw std::invalid_argument("order size must be positive");
  const std::size_t idx = require_index(order.price);

  std::vector<Trade> executed;
  if (order.side == Side::Withdraw) {
    withdraw(idx, order);
    return executed;
  }

  double remaining = order.size;
  if (order.side == Side::Buy) {
    // best (lowest) resting ask at or below the limit first
    for (std::size_t i = 0; i <= idx && remaining > 0.0; ++i) {
      Level& level = levels_[i];
      while (remaining > 0.0 && !level.asks.empty()) {
        RestingOrder& resting = level.asks.front();
        const double take = std::min(remaining, resting.size);
        resting.size -= take;
        level.ask_total -= take;
        level.matched += take;
        remaining -= take;
        executed.push_back({order.time, grid_.price(i), take});
        if (resting.size <= 0.0) level.asks.pop_front();
      }
    }
    if (remaining > 0.0) {
      levels_[idx].bids.push_back({order.time, remaining, order.expert});
      levels_[idx].bid_total += remaining;
    }
  } else {
    // best (highest) resting bid at or above the limit first
    for (std::size_t i = grid_.size(); i-- > idx && remaining > 0.0;) {
      Level& level = levels_[i];
      while (remaining > 0.0 && !level.bids.empty()) {
        RestingOrder& resting = level.bids.front();
        const double take = std::min(remaining, resting.size);
        resting.size -= take;
        level.bid_total -= take;
        level.matched += take;
        remaining -= take;
        executed.push_back({order.time, grid_.price(i), take});
        if (resting.size <= 0.0) level.bids.pop_front();
      }
    }
    if (remaining > 0.0) {
      levels_[idx].asks.push_back({order.time, remaining, order.expert});
      levels_[idx].ask_total += remaining;
    }
  }

  for (const Trade& t : executed) trades_.push_back(t);
  if (!executed.empty()) last_price_ = executed.back().price;
  return executed;
}

double OrderBook::demand(std::size_t i) const {
  return levels_[i].matched + levels_[i].bid_total;
}

double OrderBook::supply(std::size_t i) const {
  return levels_[i].matched + levels_[i].ask_total;
}

std::optional<double> OrderBook::bid() const {
  for (std::size_t i = grid_.size(); i-- > 0;) {
    if (levels_[i].bid_total > levels_[i].ask_total) return grid_.price(i);
  }
  return std::nullopt;
}

std::optional<double> OrderBook::ask() const {
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (levels_[i].ask_total > levels_[i].bid_total) return grid_.price(i);
  }
  return std::nullopt;
}

bool OrderBook::crossed() const {
  const auto b = bid();
  const auto a = ask();
  return b && a && *b >= *a;
}

OrderBook OrderBook::from_aggregate(PriceGrid grid, const std::vector<double>& demand,
                                    const std::vector<double>& supply) {
  if (demand.size() != grid.size() || supply.size() != grid.size()) {
    throw std::invalid_argument("aggregate columns must match the grid");
  }
  OrderBook book(std::move(grid));
  for (std::size_t i = 0; i < book.grid_.size(); ++i) {
    if (demand[i] < 0.0 || supply[i] < 0.0) {
      throw std::invalid_argument("aggregate volumes must be nonnegative");
    }
    Level& level = book.levels_[i];
    level.matched = std::min(demand[i], supply[i]);
    const double extra_demand = demand[i] - level.matched;
    const double extra_supply = supply[i] - level.matched;
    if (extra_demand > 0.0) {
      level.bids.push_back({0, extra_demand, "aggregate"});
      level.bid_total = extra_demand;
    }
    if (extra_supply > 0.0) {
      level.asks.push_back({0, extra_supply, "aggregate"});
      level.ask_total = extra_supply;
    }
  }
  if (book.crossed()) throw std::invalid_argument("aggregate data describes a crossed book");
  return book;
}

VolumeSnapshot aggregate_snapshot(const OrderBook& book, std::int64_t time) {
  VolumeSnapshot snap;
  snap.time = time;
  snap.prices = book.grid().prices();
  snap.buy_votes.resize(snap.prices.size());
  snap.sell_votes.resize(snap.prices.size());
  for (std::size_t i = 0; i < snap.prices.size(); ++i) {
    const double q = snap.prices[i];
    snap.buy_votes[i] = q * book.demand(i);
    snap.sell_votes[i] = (1.0 - q) * book.supply(i);
  }
  return snap;
}

std::vector<OperationalCheckpoint> operational_series(
    const std::vector<VolumeSnapshot>& snapshots, double volume_step) {
  if (!(volume_step > 0.0)) throw std::invalid_argument("volume step must be positive");
  std::vector<OperationalCheckpoint> checkpoints;
  if (snapshots.empty()) return checkpoints;

  std::vector<double> totals(snapshots.size());
  double max_total = 0.0;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    totals[i] = snapshots[i].total_votes();
    max_total = std::max(max_total, totals[i]);
  }
  for (double nu = volume_step; nu <= max_total; nu += volume_step) {
    for (std::size_t i = 0; i < totals.size(); ++i) {
      if (totals[i] >= nu) {
        checkpoints.push_back({nu, i});
        break;
      }
    }
  }
  return checkpoints;
}

}  // namespace pmkt
