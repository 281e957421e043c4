#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace pmkt {

// One row of a finite measure over (omega, signal bits). Signal bit i of
// `signals` is 1 when variable i is true.
struct World {
  int omega = 0;
  std::uint32_t signals = 0;
  double probability = 0.0;
};

struct BooleanMarketSpec {
  int num_experts = 0;  // N; experts beyond num_bits know no bits
  int num_bits = 0;     // d <= N, dimension of the signal space
  std::vector<World> measure;
  std::uint32_t real_state = 0;
  // Optional resolution function g over the 2^d signal states (index = bits).
  // When present, every positive-probability world must satisfy omega = g(s).
  std::optional<std::vector<int>> truth_table;
};

struct BooleanRound {
  std::vector<double> beliefs;  // one per expert, before the round's clearing
  double price = 0.0;           // clearing price, the mean of the beliefs
  std::size_t worlds_remaining = 0;
};

struct BooleanMarketResult {
  int rounds = 0;  // first round whose public information set is stable
  std::vector<BooleanRound> log;
  std::vector<std::uint32_t> final_worlds;
  double final_price = 0.0;
  bool final_identity = false;  // beliefs == price == public posterior at the end
};

// Round-based market: informed expert n conditions on the public world set and
// on their own bit; the others condition on the public set alone. The clearing
// price is the mean belief, and worlds whose counterfactual price differs from
// the realized one are eliminated each round.
BooleanMarketResult run_boolean_market(const BooleanMarketSpec& spec);

// Weights (w0, w1..wd) with g(s) = 1 iff w0 + sum w_i s_i >= 1, when the truth
// table admits them; found by linear feasibility over all 2^d states.
// Supported for num_bits <= 5.
std::optional<std::vector<double>> threshold_weights(const std::vector<int>& truth_table,
                                                     int num_bits);

struct XorCondition {
  bool uniform_marginals = false;
  bool predicted_stall = false;  // prices never move when marginals are uniform
};

// Stall test for the two-bit XOR resolution function.
XorCondition check_xor_condition(const BooleanMarketSpec& spec);

// Signal set with per-expert endowments and per-expert mechanism tables over
// every subset of signals (tables indexed by subset bitmask).
struct KnowledgeStructure {
  int num_signals = 0;
  std::vector<std::uint32_t> endowments;
  std::vector<std::vector<double>> mechanisms;
};

struct IrrelevanceFlags {
  bool stepwise = false;  // mechanisms agree on every sub-structure above the core
  bool endpoint = false;  // agree on the full structure, and every signal outside
                          // the core is common to all experts or never moves the value
};

// The two flags are provably equivalent; both are computed by enumeration so
// tests can check they agree. `common_core` is the bitmask of core signals.
IrrelevanceFlags verify_irrelevance_lemma(const KnowledgeStructure& structure,
                                          std::uint32_t common_core);

// Binary learning tree for one ordering of signal receipt. Heap layout: node 0
// is the root; node k has children 2k+1 (signal received as 1) and 2k+2
// (signal received as 0). Values are posterior probabilities; each edge to a
// child carries probability 0 when the received value matches the true
// assignment (the value then changes) and 1 otherwise (value unchanged).
struct LearningTree {
  std::vector<int> order;           // signal indices in receipt order
  std::vector<double> value;        // 2^(d+1)-1 node values
  std::vector<double> edge_prob;    // edge_prob[k] = probability on edge into node k, k >= 1
  std::vector<std::uint32_t> known; // per node, subset of true signals received so far
};

// One tree per ordering of the d signals (d! trees). `mechanism` maps signal
// subsets to posteriors; `true_assignment` holds the realized value bits.
std::vector<LearningTree> build_learning_trees(const std::vector<double>& mechanism,
                                               int num_signals,
                                               std::uint32_t true_assignment);

bool martingale_check(const LearningTree& tree, double tol);

}  // namespace pmkt
