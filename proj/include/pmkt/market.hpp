#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace pmkt {

// Strictly increasing prices inside (0,1).
class PriceGrid {
 public:
  explicit PriceGrid(std::vector<double> prices);

  std::size_t size() const { return prices_.size(); }
  double price(std::size_t i) const { return prices_[i]; }
  const std::vector<double>& prices() const { return prices_; }

  // Index of the grid price matching q (within 1e-9), if any.
  std::optional<std::size_t> find(double q) const;

 private:
  std::vector<double> prices_;
};

enum class Side { Buy, Sell, Withdraw };

struct OrderEvent {
  std::int64_t time = 0;
  Side side = Side::Buy;
  double price = 0.0;
  double size = 0.0;  // contracts
  std::string expert;
};

struct Trade {
  std::int64_t time = 0;
  double price = 0.0;
  double size = 0.0;
};

// Per-price vote volumes: buy votes q*S+(q), sell votes (1-q)*S-(q).
struct VolumeSnapshot {
  std::int64_t time = 0;
  std::vector<double> prices;
  std::vector<double> buy_votes;
  std::vector<double> sell_votes;

  double total_votes() const;
};

// Continuous double auction book over a fixed price grid. Matching is
// price-time priority; executed volume is recorded at the execution price on
// both sides, so per price matched = min(S+,S-) and available = |S+ - S-|.
class OrderBook {
 public:
  explicit OrderBook(PriceGrid grid);

  // Applies a buy, sell, or withdrawal and returns the trades it caused.
  // Withdrawals remove the expert's resting volume at the given price
  // (demand side first), and never trade.
  std::vector<Trade> apply(const OrderEvent& order);

  std::optional<double> bid() const;  // highest price with demand > supply
  std::optional<double> ask() const;  // lowest price with supply > demand
  std::optional<double> last_price() const { return last_price_; }

  double demand(std::size_t i) const;   // S+ at grid index i
  double supply(std::size_t i) const;   // S-
  double matched(std::size_t i) const { return levels_[i].matched; }

  const PriceGrid& grid() const { return grid_; }
  const std::vector<Trade>& trades() const { return trades_; }

  // True when some price with net demand lies at or above a price with net
  // supply; apply() never leaves the book in this state.
  bool crossed() const;

  // Book whose per-price totals equal the given aggregate demand/supply
  // columns (matched part min(S+,S-), residual resting).
  static OrderBook from_aggregate(PriceGrid grid, const std::vector<double>& demand,
                                  const std::vector<double>& supply);

 private:
  struct RestingOrder {
    std::int64_t time;
    double size;
    std::string expert;
  };
  struct Level {
    double matched = 0.0;
    double bid_total = 0.0;
    double ask_total = 0.0;
    std::deque<RestingOrder> bids;
    std::deque<RestingOrder> asks;
  };

  std::size_t require_index(double price) const;
  void withdraw(std::size_t idx, const OrderEvent& order);

  PriceGrid grid_;
  std::vector<Level> levels_;
  std::vector<Trade> trades_;
  std::optional<double> last_price_;
};

VolumeSnapshot aggregate_snapshot(const OrderBook& book, std::int64_t time);

struct OperationalCheckpoint {
  double volume;              // the volume multiple this checkpoint represents
  std::size_t snapshot_index; // earliest snapshot whose total reaches it
};

// Checkpoints at every multiple of volume_step up to the maximum total volume.
std::vector<OperationalCheckpoint> operational_series(
    const std::vector<VolumeSnapshot>& snapshots, double volume_step);

}  // namespace pmkt
