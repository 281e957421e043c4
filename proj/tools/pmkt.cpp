// pmkt: prediction-market modeling toolkit.
// Subcommands cover order-book ingestion, the censored-likelihood estimator,
// order-flow simulation, and the two round-based market models. All stochastic
// subcommands are bit-reproducible given (seed, flags, input).
#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmkt/estimator.hpp"
#include "pmkt/flow.hpp"
#include "pmkt/io.hpp"
#include "pmkt/knowledge.hpp"
#include "pmkt/market.hpp"
#include "pmkt/self_resolving.hpp"
#include "pmkt/utility.hpp"

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  return in;
}

struct CommonFlags {
  std::string out = "-";
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--out", flags.out, "output path ('-' for stdout)");
  cmd->add_option("--format", flags.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

int run_ingest(const std::string& input, const std::string& input_format,
               const CommonFlags& flags) {
  pmkt::AggregateRows rows;
  std::optional<double> bid, ask, last;
  std::size_t trade_count = 0;
  if (input_format == "aggregated") {
    auto in = open_input(input);
    rows = pmkt::read_aggregate_csv(in);
    const pmkt::OrderBook book =
        pmkt::OrderBook::from_aggregate(pmkt::PriceGrid(rows.prices), rows.demand, rows.supply);
    bid = book.bid();
    ask = book.ask();
    rows = pmkt::book_aggregate(book);
  } else {
    auto in = open_input(input);
    const auto events = pmkt::read_events_csv(in);
    std::vector<double> prices;
    for (const auto& ev : events) prices.push_back(ev.price);
    std::sort(prices.begin(), prices.end());
    prices.erase(std::unique(prices.begin(), prices.end()), prices.end());
    pmkt::OrderBook book{pmkt::PriceGrid(prices)};
    for (const auto& ev : events) book.apply(ev);
    bid = book.bid();
    ask = book.ask();
    last = book.last_price();
    trade_count = book.trades().size();
    rows = pmkt::book_aggregate(book);
  }

  if (flags.format == "json") {
    nlohmann::json j;
    j["bid"] = bid ? nlohmann::json(*bid) : nlohmann::json();
    j["ask"] = ask ? nlohmann::json(*ask) : nlohmann::json();
    j["last"] = last ? nlohmann::json(*last) : nlohmann::json();
    j["trades"] = trade_count;
    j["rows"] = nlohmann::json::array();
    for (std::size_t i = 0; i < rows.prices.size(); ++i) {
      j["rows"].push_back({{"q", rows.prices[i]},
                           {"s_plus", rows.demand[i]},
                           {"s_minus", rows.supply[i]}});
    }
    pmkt::write_file_atomic(flags.out, j.dump(2) + "\n");
  } else {
    std::ostringstream out;
    pmkt::write_aggregate_csv(out, rows);
    pmkt::write_file_atomic(flags.out, out.str());
  }
  return 0;
}

int run_estimate(const std::string& input, double volume_step, int threads,
                 const CommonFlags& flags) {
  auto in = open_input(input);
  const pmkt::SnapshotSeries series = pmkt::read_snapshot_series(in);
  const std::vector<pmkt::VolumeSnapshot> snapshots = series.to_snapshots();
  const std::vector<pmkt::EstimateRecord> records =
      pmkt::estimate_series(snapshots, volume_step, {}, threads);
  if (flags.format == "json") {
    pmkt::write_file_atomic(flags.out, pmkt::estimates_to_json(records) + "\n");
  } else {
    std::ostringstream out;
    pmkt::write_estimates_csv(out, records);
    pmkt::write_file_atomic(flags.out, out.str());
  }
  return 0;
}

int run_eval(double lambda, double q, std::optional<double> pi, const CommonFlags& flags) {
  const pmkt::ThresholdPair t = pmkt::censoring_thresholds(lambda, q);
  nlohmann::json j{{"lambda", lambda},
                   {"q", q},
                   {"buy_threshold", t.buy},
                   {"sell_threshold", t.sell},
                   {"indifference", pmkt::indifference_belief(q, lambda)}};
  if (pi) {
    const pmkt::UtilityPair u = pmkt::expected_utilities(*pi, q, lambda);
    const pmkt::CensorResult c = pmkt::censor_tests(*pi, q, lambda);
    j["pi"] = *pi;
    j["buy_utility"] = u.buy;
    j["sell_utility"] = u.sell;
    j["buy_admissible"] = c.buy_admissible;
    j["sell_admissible"] = c.sell_admissible;
  }
  pmkt::write_file_atomic(flags.out, j.dump(2) + "\n");
  return 0;
}

std::string trajectory_csv(const pmkt::SinglePriceConfig& config,
                           const pmkt::FlowTrajectory& trajectory) {
  std::ostringstream out;
  out << "# mu=" << pmkt::format_double(config.mu) << "\n"
      << "# sigma=" << pmkt::format_double(config.sigma) << "\n"
      << "# lambda=" << pmkt::format_double(config.lambda) << "\n"
      << "# q=" << pmkt::format_double(config.price) << "\n"
      << "# rho_plus=" << pmkt::format_double(config.rho_buy) << "\n"
      << "# rho_minus=" << pmkt::format_double(config.rho_sell) << "\n"
      << "# votes=" << config.votes << "\n"
      << "# seed=" << config.seed << "\n";
  out << "vote,demand_minus_supply\n";
  for (std::size_t k = 0; k < trajectory.demand_minus_supply.size(); ++k) {
    out << (k + 1) << ',' << pmkt::format_double(trajectory.demand_minus_supply[k]) << '\n';
  }
  return out.str();
}

int run_simulate(pmkt::SinglePriceConfig config, bool lambda_given, const CommonFlags& flags) {
  if (!lambda_given) config.lambda = pmkt::equilibrium_lambda(config.mu, config.sigma);
  const pmkt::FlowTrajectory trajectory = pmkt::simulate_single_price(config);
  pmkt::write_file_atomic(flags.out, trajectory_csv(config, trajectory));
  return 0;
}

int run_simulate_book(pmkt::BookRunConfig config, bool lambda_given, const std::string& counts_path,
                      const std::string& rho_spec, const CommonFlags& flags) {
  {
    std::stringstream ss(rho_spec);
    std::vector<double> parts;
    std::string field;
    while (std::getline(ss, field, ',')) parts.push_back(std::stod(field));
    if (parts.size() != 4) throw std::runtime_error("--rho expects 'k+,d+,k-,d-'");
    config.rho = {parts[0], parts[1], parts[2], parts[3]};
  }
  auto in = open_input(counts_path);
  for (const auto& [q, count] : pmkt::read_counts_csv(in)) {
    config.prices.push_back(q);
    config.counts.push_back(count);
  }
  if (!lambda_given) config.lambda = pmkt::equilibrium_lambda(config.mu, config.sigma);

  const pmkt::VolumeSnapshot snap = pmkt::simulate_book(config);
  std::ostringstream out;
  out << "# mu=" << pmkt::format_double(config.mu) << "\n"
      << "# sigma=" << pmkt::format_double(config.sigma) << "\n"
      << "# lambda=" << pmkt::format_double(config.lambda) << "\n"
      << "# rho=" << rho_spec << "\n"
      << "# counts=" << counts_path << "\n"
      << "# seed=" << config.seed << "\n";
  out << "q,v_plus,v_minus\n";
  for (std::size_t i = 0; i < snap.prices.size(); ++i) {
    out << pmkt::format_double(snap.prices[i]) << ',' << pmkt::format_double(snap.buy_votes[i])
        << ',' << pmkt::format_double(snap.sell_votes[i]) << '\n';
  }
  pmkt::write_file_atomic(flags.out, out.str());
  return 0;
}

int run_boolean_market(const std::string& spec_path, bool trace, const CommonFlags& flags) {
  auto in = open_input(spec_path);
  const pmkt::BooleanMarketSpec spec = pmkt::load_boolean_spec(in);
  const pmkt::BooleanMarketResult result = pmkt::run_boolean_market(spec);
  nlohmann::json j{{"rounds", result.rounds},
                   {"final_price", result.final_price},
                   {"final_identity", result.final_identity}};
  j["final_worlds"] = result.final_worlds;
  if (trace) {
    j["log"] = nlohmann::json::array();
    for (const auto& round : result.log) {
      j["log"].push_back({{"price", round.price},
                          {"beliefs", round.beliefs},
                          {"worlds_remaining", round.worlds_remaining}});
    }
  }
  pmkt::write_file_atomic(flags.out, j.dump(2) + "\n");
  return 0;
}

int run_self_resolving(const std::string& spec_path, std::optional<int> audit_id,
                       const CommonFlags& flags) {
  auto in = open_input(spec_path);
  const pmkt::SrmScenario scenario = pmkt::load_srm_scenario(in);
  const pmkt::SrmResult result = pmkt::run_srm(scenario);
  nlohmann::json j{{"rounds", result.rounds},
                   {"price_trail", result.price_trail},
                   {"final_identity", result.final_identity}};
  std::vector<std::string> pool;
  for (std::size_t i = 0; i < scenario.mechanism.signal_names.size(); ++i) {
    if (result.final_pool & (1u << i)) pool.push_back(scenario.mechanism.signal_names[i]);
  }
  j["final_pool"] = pool;
  j["joins"] = nlohmann::json::array();
  for (const auto& join : result.joins) {
    j["joins"].push_back({{"expert", join.expert},
                          {"round", join.round},
                          {"side", join.bought ? "buy" : "sell"},
                          {"price", join.price},
                          {"shared", join.shared}});
  }
  if (audit_id) {
    std::size_t index = scenario.expert_ids.size();
    for (std::size_t i = 0; i < scenario.expert_ids.size(); ++i) {
      if (scenario.expert_ids[i] == *audit_id) index = i;
    }
    if (index == scenario.expert_ids.size()) {
      throw std::runtime_error("no expert with id " + std::to_string(*audit_id));
    }
    const pmkt::AuditResult audit =
        pmkt::best_response_audit(scenario.mechanism, scenario.endowments, index);
    j["audit"] = {{"expert", *audit_id},
                  {"silent_profit", audit.silent_profit},
                  {"share_sign", audit.share_sign},
                  {"join_round", audit.join_round}};
  }
  pmkt::write_file_atomic(flags.out, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prediction-market modeling toolkit"};
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "read order data and print the aggregated book");
  std::string ingest_input, ingest_format = "aggregated";
  CommonFlags ingest_flags;
  ingest->add_option("--input", ingest_input, "input CSV")->required();
  ingest->add_option("--input-format", ingest_format, "events or aggregated")
      ->check(CLI::IsMember({"events", "aggregated"}));
  add_common(ingest, ingest_flags);

  auto* estimate = app.add_subcommand("estimate", "estimate belief parameters per checkpoint");
  std::string est_input;
  double est_step = 0.0;
  int est_threads = 1;
  CommonFlags est_flags;
  estimate->add_option("--input", est_input, "snapshot series CSV")->required();
  estimate->add_option("--volume-step", est_step, "operational-volume step")->required();
  estimate->add_option("--threads", est_threads, "parallel checkpoint workers");
  add_common(estimate, est_flags);

  auto* eval = app.add_subcommand("eval", "print thresholds and utilities for given parameters");
  double eval_lambda = 0.0, eval_q = 0.0, eval_pi_raw = 0.0;
  CommonFlags eval_flags;
  eval->add_option("--lambda", eval_lambda, "risk parameter")->required();
  eval->add_option("--q", eval_q, "price")->required();
  auto* pi_opt = eval->add_option("--pi", eval_pi_raw, "belief to evaluate");
  add_common(eval, eval_flags);

  auto* simulate = app.add_subcommand("simulate", "single-price vote stream");
  pmkt::SinglePriceConfig sim_cfg;
  CommonFlags sim_flags;
  simulate->add_option("--mu", sim_cfg.mu, "belief location")->required();
  simulate->add_option("--sigma", sim_cfg.sigma, "belief dispersion")->required();
  simulate->add_option("--q", sim_cfg.price, "price")->required();
  simulate->add_option("--rho-plus", sim_cfg.rho_buy, "buy-side matching probability")->required();
  simulate->add_option("--rho-minus", sim_cfg.rho_sell, "sell-side matching probability")
      ->required();
  simulate->add_option("--votes", sim_cfg.votes, "number of votes")->required();
  simulate->add_option("--seed", sim_cfg.seed, "random seed")->required();
  auto* sim_lambda =
      simulate->add_option("--lambda", sim_cfg.lambda, "risk parameter (default: equilibrium)");
  add_common(simulate, sim_flags);

  auto* simbook = app.add_subcommand("simulate-book", "whole-book vote generation");
  pmkt::BookRunConfig book_cfg;
  std::string book_counts, book_rho;
  CommonFlags book_flags;
  simbook->add_option("--mu", book_cfg.mu, "belief location")->required();
  simbook->add_option("--sigma", book_cfg.sigma, "belief dispersion")->required();
  auto* book_lambda =
      simbook->add_option("--lambda", book_cfg.lambda, "risk parameter (default: equilibrium)");
  simbook->add_option("--rho", book_rho, "matching curves 'k+,d+,k-,d-'")->required();
  simbook->add_option("--counts", book_counts, "per-price vote counts CSV")->required();
  simbook->add_option("--seed", book_cfg.seed, "random seed")->required();
  add_common(simbook, book_flags);

  auto* boolmkt = app.add_subcommand("boolean-market", "round-based bit-signal market");
  std::string bool_spec;
  bool bool_trace = false;
  CommonFlags bool_flags;
  boolmkt->add_option("--spec", bool_spec, "market spec JSON")->required();
  boolmkt->add_flag("--trace", bool_trace, "include the full round log");
  add_common(boolmkt, bool_flags);

  auto* selfres = app.add_subcommand("self-resolving", "round-based information-sharing market");
  std::string sr_spec;
  int sr_audit_raw = 0;
  CommonFlags sr_flags;
  selfres->add_option("--spec", sr_spec, "scenario JSON")->required();
  auto* audit_opt = selfres->add_option("--audit", sr_audit_raw, "audit this expert id");
  add_common(selfres, sr_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest) return run_ingest(ingest_input, ingest_format, ingest_flags);
    if (*estimate) return run_estimate(est_input, est_step, est_threads, est_flags);
    if (*eval) {
      std::optional<double> pi;
      if (pi_opt->count() > 0) pi = eval_pi_raw;
      return run_eval(eval_lambda, eval_q, pi, eval_flags);
    }
    if (*simulate) return run_simulate(sim_cfg, sim_lambda->count() > 0, sim_flags);
    if (*simbook) {
      return run_simulate_book(book_cfg, book_lambda->count() > 0, book_counts, book_rho,
                               book_flags);
    }
    if (*boolmkt) return run_boolean_market(bool_spec, bool_trace, bool_flags);
    if (*selfres) {
      std::optional<int> audit;
      if (audit_opt->count() > 0) audit = sr_audit_raw;
      return run_self_resolving(sr_spec, audit, sr_flags);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
