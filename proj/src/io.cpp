#include "pmkt/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pmkt {

namespace {

using Line = std::pair<int, std::string>;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

double parse_double(const std::string& field, int line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::runtime_error("malformed number '" + field + "', line " + std::to_string(line_no));
  }
  return value;
}

std::int64_t parse_int(const std::string& field, int line_no) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::runtime_error("malformed integer '" + field + "', line " + std::to_string(line_no));
  }
  return value;
}

std::vector<Line> read_lines(std::istream& in) {
  std::vector<Line> lines;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    lines.emplace_back(no, line);
  }
  return lines;
}

AggregateRows parse_aggregate_block(const std::vector<Line>& lines) {
  AggregateRows rows;
  bool header_seen = false;
  for (const auto& [no, raw] : lines) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "q,s_plus,s_minus") {
        throw std::runtime_error("expected header 'q,s_plus,s_minus', line " + std::to_string(no));
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw std::runtime_error("expected 3 fields, line " + std::to_string(no));
    }
    const double q = parse_double(fields[0], no);
    if (!(q > 0.0 && q < 1.0)) {
      throw std::runtime_error("price out of range, line " + std::to_string(no));
    }
    if (!rows.prices.empty() && q <= rows.prices.back()) {
      throw std::runtime_error("prices must be strictly increasing, line " + std::to_string(no));
    }
    const double demand = parse_double(fields[1], no);
    const double supply = parse_double(fields[2], no);
    if (demand < 0.0 || supply < 0.0) {
      throw std::runtime_error("volumes must be nonnegative, line " + std::to_string(no));
    }
    rows.prices.push_back(q);
    rows.demand.push_back(demand);
    rows.supply.push_back(supply);
  }
  return rows;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

AggregateRows read_aggregate_csv(std::istream& in) {
  return parse_aggregate_block(read_lines(in));
}

void write_aggregate_csv(std::ostream& out, const AggregateRows& rows,
                         const std::vector<std::string>& comments) {
  for (const std::string& c : comments) out << "# " << c << "\n";
  out << "q,s_plus,s_minus\n";
  for (std::size_t i = 0; i < rows.prices.size(); ++i) {
    out << format_double(rows.prices[i]) << ',' << format_double(rows.demand[i]) << ','
        << format_double(rows.supply[i]) << '\n';
  }
}

AggregateRows book_aggregate(const OrderBook& book) {
  AggregateRows rows;
  rows.prices = book.grid().prices();
  for (std::size_t i = 0; i < rows.prices.size(); ++i) {
    rows.demand.push_back(book.demand(i));
    rows.supply.push_back(book.supply(i));
  }
  return rows;
}

std::vector<OrderEvent> read_events_csv(std::istream& in) {
  std::vector<OrderEvent> events;
  bool header_seen = false;
  for (const auto& [no, raw] : read_lines(in)) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "time,side,price,size,expert") {
        throw std::runtime_error("expected header 'time,side,price,size,expert', line " +
                                 std::to_string(no));
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 5) {
      throw std::runtime_error("expected 5 fields, line " + std::to_string(no));
    }
    OrderEvent ev;
    ev.time = parse_int(fields[0], no);
    if (fields[1] == "B") {
      ev.side = Side::Buy;
    } else if (fields[1] == "S") {
      ev.side = Side::Sell;
    } else if (fields[1] == "W") {
      ev.side = Side::Withdraw;
    } else {
      throw std::runtime_error("side must be B, S or W, line " + std::to_string(no));
    }
    ev.price = parse_double(fields[2], no);
    if (!(ev.price > 0.0 && ev.price < 1.0)) {
      throw std::runtime_error("price out of range, line " + std::to_string(no));
    }
    ev.size = parse_double(fields[3], no);
    if (!(ev.size > 0.0)) {
      throw std::runtime_error("size must be positive, line " + std::to_string(no));
    }
    ev.expert = fields[4];
    events.push_back(std::move(ev));
  }
  return events;
}

SnapshotSeries read_snapshot_series(std::istream& in) {
  SnapshotSeries series;
  std::vector<Line> block;
  std::int64_t block_time = 0;
  bool in_block = false;

  const auto flush = [&] {
    if (!in_block) return;
    series.times.push_back(block_time);
    series.blocks.push_back(parse_aggregate_block(block));
    block.clear();
  };

  for (const auto& [no, raw] : read_lines(in)) {
    const std::string line = trim(raw);
    if (line.rfind("# t=", 0) == 0) {
      flush();
      block_time = parse_int(trim(line.substr(4)), no);
      in_block = true;
      continue;
    }
    if (line.empty()) continue;
    if (!in_block) {  // bare aggregated file: a single block at t=0
      block_time = 0;
      in_block = true;
    }
    block.emplace_back(no, line);
  }
  flush();
  return series;
}

void write_snapshot_series(std::ostream& out, const SnapshotSeries& series) {
  for (std::size_t b = 0; b < series.blocks.size(); ++b) {
    out << "# t=" << series.times[b] << "\n";
    write_aggregate_csv(out, series.blocks[b]);
  }
}

std::vector<VolumeSnapshot> SnapshotSeries::to_snapshots() const {
  std::vector<VolumeSnapshot> snaps;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const AggregateRows& rows = blocks[b];
    OrderBook book = OrderBook::from_aggregate(PriceGrid(rows.prices), rows.demand, rows.supply);
    snaps.push_back(aggregate_snapshot(book, times[b]));
  }
  return snaps;
}

std::vector<std::pair<double, long>> read_counts_csv(std::istream& in) {
  std::vector<std::pair<double, long>> counts;
  bool header_seen = false;
  for (const auto& [no, raw] : read_lines(in)) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "q,count") {
        throw std::runtime_error("expected header 'q,count', line " + std::to_string(no));
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 2) {
      throw std::runtime_error("expected 2 fields, line " + std::to_string(no));
    }
    const double q = parse_double(fields[0], no);
    if (!(q > 0.0 && q < 1.0)) {
      throw std::runtime_error("price out of range, line " + std::to_string(no));
    }
    counts.emplace_back(q, parse_int(fields[1], no));
  }
  return counts;
}

std::string estimates_to_json(const std::vector<EstimateRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const EstimateRecord& r : records) {
    arr.push_back({{"nu", r.volume},
                   {"t", r.time},
                   {"mu", r.mu},
                   {"sigma", r.sigma},
                   {"lambda", r.lambda},
                   {"loglik", r.loglik},
                   {"converged", r.converged},
                   {"boundary", r.boundary}});
  }
  return arr.dump(2);
}

void write_estimates_csv(std::ostream& out, const std::vector<EstimateRecord>& records) {
  out << "nu,t,mu,sigma,lambda,loglik,converged,boundary\n";
  for (const EstimateRecord& r : records) {
    out << format_double(r.volume) << ',' << r.time << ',' << format_double(r.mu) << ','
        << format_double(r.sigma) << ',' << format_double(r.lambda) << ','
        << format_double(r.loglik) << ',' << (r.converged ? 1 : 0) << ','
        << (r.boundary ? 1 : 0) << '\n';
  }
}

BooleanMarketSpec load_boolean_spec(std::istream& in) {
  nlohmann::json j;
  in >> j;
  BooleanMarketSpec spec;
  spec.num_experts = j.at("n").get<int>();
  spec.num_bits = j.at("d").get<int>();

  const auto bits_to_mask = [&](const nlohmann::json& arr) {
    if (static_cast<int>(arr.size()) != spec.num_bits) {
      throw std::runtime_error("bit array length must equal d");
    }
    std::uint32_t mask = 0;
    for (int i = 0; i < spec.num_bits; ++i) {
      const int bit = arr.at(i).get<int>();
      if (bit != 0 && bit != 1) throw std::runtime_error("bits must be 0 or 1");
      if (bit) mask |= 1u << i;
    }
    return mask;
  };

  for (const auto& row : j.at("P")) {
    World w;
    w.omega = row.at("omega").get<int>();
    w.signals = bits_to_mask(row.at("s"));
    w.probability = row.at("p").get<double>();
    spec.measure.push_back(w);
  }
  spec.real_state = bits_to_mask(j.at("r"));

  if (j.contains("g")) {
    const std::size_t states = std::size_t{1} << spec.num_bits;
    std::vector<int> table(states, 0);
    if (j["g"].is_string()) {
      const std::string name = j["g"].get<std::string>();
      for (std::size_t s = 0; s < states; ++s) {
        const int ones = __builtin_popcount(static_cast<unsigned>(s));
        if (name == "xor") {
          table[s] = ones % 2;
        } else if (name == "majority") {
          table[s] = 2 * ones > spec.num_bits ? 1 : 0;
        } else {
          throw std::runtime_error("unknown resolution function: " + name);
        }
      }
    } else {
      const auto& arr = j["g"].at("table");
      if (arr.size() != states) throw std::runtime_error("truth table size must be 2^d");
      for (std::size_t s = 0; s < states; ++s) table[s] = arr.at(s).get<int>();
    }
    spec.truth_table = std::move(table);
  }
  return spec;
}

SrmScenario load_srm_scenario(std::istream& in) {
  nlohmann::json j;
  in >> j;
  SrmScenario scenario;
  for (const auto& name : j.at("gamma")) {
    scenario.mechanism.signal_names.push_back(name.get<std::string>());
  }
  const std::size_t n_signals = scenario.mechanism.signal_names.size();

  const auto name_bit = [&](const std::string& name) {
    for (std::size_t i = 0; i < n_signals; ++i) {
      if (scenario.mechanism.signal_names[i] == name) return static_cast<std::uint32_t>(1u << i);
    }
    throw std::runtime_error("unknown signal name: " + name);
  };

  scenario.mechanism.values.assign(std::size_t{1} << n_signals,
                                   std::numeric_limits<double>::quiet_NaN());
  for (const auto& [key, value] : j.at("mechanism").items()) {
    std::uint32_t mask = 0;
    if (!key.empty()) {
      for (const std::string& part : split_fields(key)) mask |= name_bit(part);
    }
    scenario.mechanism.values[mask] = value.get<double>();
  }
  for (double v : scenario.mechanism.values) {
    if (std::isnan(v)) throw std::runtime_error("mechanism must list every signal subset");
  }

  for (const auto& expert : j.at("experts")) {
    scenario.expert_ids.push_back(expert.at("id").get<int>());
    std::uint32_t mask = 0;
    for (const auto& signal : expert.at("signals")) mask |= name_bit(signal.get<std::string>());
    scenario.endowments.push_back(mask);
    scenario.strategies.push_back(AgentStrategy::Efficient);
  }

  if (j.contains("strategies")) {
    for (const auto& [key, value] : j["strategies"].items()) {
      const std::string policy = value.get<std::string>();
      AgentStrategy strategy;
      if (policy == "efficient") {
        strategy = AgentStrategy::Efficient;
      } else if (policy == "silent") {
        strategy = AgentStrategy::SilentDeviant;
      } else {
        throw std::runtime_error("unknown strategy: " + policy);
      }
      if (key == "default") {
        for (auto& s : scenario.strategies) s = strategy;
      } else {
        const int id = std::stoi(key);
        bool found = false;
        for (std::size_t i = 0; i < scenario.expert_ids.size(); ++i) {
          if (scenario.expert_ids[i] == id) {
            scenario.strategies[i] = strategy;
            found = true;
          }
        }
        if (!found) throw std::runtime_error("strategy for unknown expert id " + key);
      }
    }
  }
  return scenario;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  if (path == "-" || path.empty()) {
    std::cout << content;
    std::cout.flush();
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move " + tmp + " to " + path);
  }
}

}  // namespace pmkt
