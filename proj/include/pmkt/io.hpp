#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pmkt/estimator.hpp"
#include "pmkt/knowledge.hpp"
#include "pmkt/market.hpp"
#include "pmkt/self_resolving.hpp"

namespace pmkt {

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

// Aggregated format: header `q,s_plus,s_minus`, one row per grid price,
// strictly increasing prices in (0,1). Leading `#` lines are comments.
struct AggregateRows {
  std::vector<double> prices;
  std::vector<double> demand;
  std::vector<double> supply;
};

AggregateRows read_aggregate_csv(std::istream& in);
void write_aggregate_csv(std::ostream& out, const AggregateRows& rows,
                         const std::vector<std::string>& comments = {});
AggregateRows book_aggregate(const OrderBook& book);

// Events format: header `time,side,price,size,expert`, side in {B,S,W}.
std::vector<OrderEvent> read_events_csv(std::istream& in);

// Snapshot series: one aggregated block per checkpoint, each introduced by a
// `# t=<time>` line. A bare aggregated file reads as a single block at t=0.
struct SnapshotSeries {
  std::vector<std::int64_t> times;
  std::vector<AggregateRows> blocks;

  std::vector<VolumeSnapshot> to_snapshots() const;
};

SnapshotSeries read_snapshot_series(std::istream& in);
void write_snapshot_series(std::ostream& out, const SnapshotSeries& series);

// Vote-count layout for book simulation: header `q,count`.
std::vector<std::pair<double, long>> read_counts_csv(std::istream& in);

std::string estimates_to_json(const std::vector<EstimateRecord>& records);
void write_estimates_csv(std::ostream& out, const std::vector<EstimateRecord>& records);

// Market spec files (JSON) for the round-based simulators.
BooleanMarketSpec load_boolean_spec(std::istream& in);
SrmScenario load_srm_scenario(std::istream& in);

// Writes content to path via a temporary file and rename; "-" means stdout.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace pmkt
