#include <doctest.h>

#include <cmath>
#include <fstream>

#include "pmkt/io.hpp"
#include "pmkt/knowledge.hpp"
#include "pmkt/rng.hpp"
#include "support/helpers.hpp"

using namespace pmkt;

namespace {

BooleanMarketSpec load_spec(const std::string& name) {
  std::ifstream in(testsupport::fixture_path(name));
  REQUIRE(in.good());
  return load_boolean_spec(in);
}

// random measure over the worlds determined by g, with guaranteed mass on r
BooleanMarketSpec random_threshold_spec(const std::vector<int>& table, int bits, Rng& rng) {
  BooleanMarketSpec spec;
  spec.num_bits = bits;
  spec.num_experts = bits;
  spec.truth_table = table;
  double total = 0.0;
  std::vector<double> weights(1u << bits);
  for (double& w : weights) {
    w = rng.uniform() < 0.25 ? 0.0 : 0.05 + rng.uniform();
    total += w;
  }
  std::vector<std::uint32_t> supported;
  for (std::uint32_t s = 0; s < weights.size(); ++s) {
    if (weights[s] > 0.0) supported.push_back(s);
  }
  if (supported.empty()) {
    weights[0] = 1.0;
    total = 1.0;
    supported.push_back(0);
  }
  for (std::uint32_t s = 0; s < weights.size(); ++s) {
    if (weights[s] > 0.0) spec.measure.push_back({table[s], s, weights[s] / total});
  }
  spec.real_state = supported[rng.next_u64() % supported.size()];
  return spec;
}

}  // namespace

TEST_CASE("three-outcome example converges to certainty in two rounds") {
  const BooleanMarketResult r = run_boolean_market(load_spec("xyz.json"));
  CHECK(r.rounds == 2);
  REQUIRE(r.log.size() == 2);
  CHECK(r.log[0].price == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.final_price == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(r.final_worlds.size() == 1);
  CHECK(r.final_worlds[0] == 0u);  // the real state
  CHECK(r.final_identity);
}

TEST_CASE("uninformed experts join the public posterior without breaking convergence") {
  BooleanMarketSpec spec = load_spec("xyz.json");
  spec.num_experts = 4;  // two informed, two merely watching
  const BooleanMarketResult r = run_boolean_market(spec);
  CHECK(r.final_price == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.final_identity);
  REQUIRE(r.log.size() >= 1);
  // round one: informed experts at 1/2, watchers at the prior 1/3
  CHECK(r.log[0].beliefs[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.log[0].beliefs[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("xor with uniform marginals stalls immediately") {
  const BooleanMarketSpec spec = load_spec("xor_uniform.json");
  const BooleanMarketResult r = run_boolean_market(spec);
  CHECK(r.rounds == 1);
  CHECK(r.log[0].worlds_remaining == 4);

  const XorCondition cond = check_xor_condition(spec);
  CHECK(cond.uniform_marginals);
  CHECK(cond.predicted_stall);
}

TEST_CASE("perturbed xor converges to the resolution value") {
  const BooleanMarketSpec spec = load_spec("xor_perturbed.json");
  const XorCondition cond = check_xor_condition(spec);
  CHECK_FALSE(cond.uniform_marginals);
  CHECK_FALSE(cond.predicted_stall);

  const BooleanMarketResult r = run_boolean_market(spec);
  const int g_at_r = (*spec.truth_table)[spec.real_state];
  CHECK(r.final_price == doctest::Approx(g_at_r).epsilon(1e-12));
}

TEST_CASE("degenerate xor measure with mass only on equal bits stalls") {
  BooleanMarketSpec spec;
  spec.num_bits = 2;
  spec.num_experts = 2;
  spec.truth_table = std::vector<int>{0, 1, 1, 0};
  spec.measure = {{0, 0, 0.5}, {0, 3, 0.5}};
  spec.real_state = 3;
  const XorCondition cond = check_xor_condition(spec);
  CHECK(cond.uniform_marginals);
  CHECK(cond.predicted_stall);
  CHECK(run_boolean_market(spec).rounds == 1);
}

TEST_CASE("threshold weight search") {
  // three-input majority
  std::vector<int> majority(8);
  for (std::uint32_t s = 0; s < 8; ++s) majority[s] = __builtin_popcount(s) >= 2 ? 1 : 0;
  const auto w = threshold_weights(majority, 3);
  REQUIRE(w.has_value());
  for (std::uint32_t s = 0; s < 8; ++s) {
    double acc = (*w)[0];
    for (int i = 0; i < 3; ++i) {
      if (s & (1u << i)) acc += (*w)[1 + i];
    }
    CHECK((acc >= 1.0 - 1e-9) == (majority[s] == 1));
  }

  CHECK_FALSE(threshold_weights({0, 1, 1, 0}, 2).has_value());  // xor

  const auto always = threshold_weights({1, 1, 1, 1}, 2);
  REQUIRE(always.has_value());
  CHECK((*always)[0] >= 1.0 - 1e-9);
  const auto never = threshold_weights({0, 0, 0, 0}, 2);
  CHECK(never.has_value());

  CHECK_THROWS_AS(threshold_weights(std::vector<int>(64, 0), 6), std::invalid_argument);
}

TEST_CASE("threshold-representable functions drive the market to the truth") {
  Rng rng(99);
  int checked = 0;
  while (checked < 20) {
    const int bits = 2 + static_cast<int>(rng.next_u64() % 3);  // 2..4
    // random integer weights induce a threshold function
    std::vector<double> w(bits + 1);
    for (double& x : w) x = std::floor(rng.uniform() * 7.0) - 3.0;
    std::vector<int> table(1u << bits);
    int ones = 0;
    for (std::uint32_t s = 0; s < table.size(); ++s) {
      double acc = w[0];
      for (int i = 0; i < bits; ++i) {
        if (s & (1u << i)) acc += w[1 + i];
      }
      table[s] = acc >= 1.0 ? 1 : 0;
      ones += table[s];
    }
    if (ones == 0 || ones == static_cast<int>(table.size())) continue;  // keep it interesting
    ++checked;

    CHECK(threshold_weights(table, bits).has_value());
    const BooleanMarketSpec spec = random_threshold_spec(table, bits, rng);
    const BooleanMarketResult r = run_boolean_market(spec);
    CHECK(r.final_price == doctest::Approx(table[spec.real_state]).epsilon(1e-9));
  }
}

namespace {

KnowledgeStructure shared_structure(int signals, const std::vector<std::uint32_t>& endowments,
                                    const std::vector<double>& mechanism) {
  KnowledgeStructure s;
  s.num_signals = signals;
  s.endowments = endowments;
  s.mechanisms.assign(endowments.size(), mechanism);
  return s;
}

}  // namespace

TEST_CASE("irrelevance flags: vacuous core and a private relevant signal") {
  // two signals, both inside the core: vacuously irrelevance-free
  std::vector<double> mech = {0.2, 0.5, 0.7, 0.9};
  const KnowledgeStructure vac = shared_structure(2, {1u, 2u}, mech);
  const IrrelevanceFlags vflags = verify_irrelevance_lemma(vac, 3u);
  CHECK(vflags.stepwise);
  CHECK(vflags.endpoint);
  CHECK(vflags.stepwise == vflags.endpoint);

  // signal 1 is private to expert 0 and moves the value: both flags drop
  const KnowledgeStructure bad = shared_structure(2, {3u, 2u}, mech);
  const IrrelevanceFlags bflags = verify_irrelevance_lemma(bad, 2u);
  CHECK_FALSE(bflags.stepwise);
  CHECK_FALSE(bflags.endpoint);

  // making that signal irrelevant in the table restores both flags
  std::vector<double> flat = {0.2, 0.2, 0.7, 0.7};  // value ignores signal 0
  const KnowledgeStructure ok = shared_structure(2, {3u, 2u}, flat);
  const IrrelevanceFlags oflags = verify_irrelevance_lemma(ok, 2u);
  CHECK(oflags.stepwise);
  CHECK(oflags.endpoint);
}

TEST_CASE("irrelevance flags agree on random structures") {
  Rng rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 4);  // 2..5 signals
    const std::uint32_t full = (1u << n) - 1u;
    const int experts = 2 + static_cast<int>(rng.next_u64() % 2);

    KnowledgeStructure s;
    s.num_signals = n;
    std::uint32_t covered = 0;
    for (int e = 0; e < experts; ++e) {
      const std::uint32_t mask = static_cast<std::uint32_t>(rng.next_u64()) & full;
      s.endowments.push_back(mask);
      covered |= mask;
    }
    s.endowments[0] |= full & ~covered;  // every signal belongs to someone

    // mix of constructions: shared table, shared with an irrelevant bit,
    // per-expert perturbations
    const int kind = static_cast<int>(rng.next_u64() % 3);
    std::vector<double> base(1u << n);
    const std::uint32_t flat_bit = 1u << (rng.next_u64() % n);
    for (std::uint32_t g = 0; g <= full; ++g) {
      base[g] = rng.uniform();
      if (kind == 1 && (g & flat_bit)) base[g] = base[g & ~flat_bit];
    }
    s.mechanisms.assign(experts, base);
    if (kind == 2) s.mechanisms[experts - 1][rng.next_u64() % (full + 1)] += 0.25;

    const std::uint32_t core = static_cast<std::uint32_t>(rng.next_u64()) & full;
    const IrrelevanceFlags flags = verify_irrelevance_lemma(s, core);
    CHECK(flags.stepwise == flags.endpoint);
  }
}

TEST_CASE("learning trees reproduce the two-signal layout") {
  // posterior values for knowing nothing, each single signal, and both
  const double base = 0.3, first = 0.55, second = 0.45, both = 0.9;
  const std::vector<double> mech = {base, first, second, both};
  // true assignment: signal 0 is 1, signal 1 is 0
  const auto trees = build_learning_trees(mech, 2, 0b01u);
  REQUIRE(trees.size() == 2);

  const LearningTree& t01 = trees[0];  // receives signal 0 first
  REQUIRE(t01.order == std::vector<int>{0, 1});
  CHECK(t01.value[0] == base);
  CHECK(t01.edge_prob[1] == 0.0);  // signal 0 = 1 matches the truth: surprising
  CHECK(t01.value[1] == first);
  CHECK(t01.edge_prob[2] == 1.0);
  CHECK(t01.value[2] == base);
  CHECK(t01.edge_prob[3] == 1.0);  // then signal 1 = 1 contradicts the truth
  CHECK(t01.value[3] == first);
  CHECK(t01.edge_prob[4] == 0.0);
  CHECK(t01.value[4] == both);
  CHECK(t01.edge_prob[5] == 1.0);
  CHECK(t01.value[5] == base);
  CHECK(t01.edge_prob[6] == 0.0);
  CHECK(t01.value[6] == second);

  const LearningTree& t10 = trees[1];  // receives signal 1 first
  REQUIRE(t10.order == std::vector<int>{1, 0});
  CHECK(t10.value[0] == base);
  CHECK(t10.edge_prob[1] == 1.0);
  CHECK(t10.value[1] == base);
  CHECK(t10.edge_prob[2] == 0.0);
  CHECK(t10.value[2] == second);
  CHECK(t10.edge_prob[3] == 0.0);
  CHECK(t10.value[3] == first);
  CHECK(t10.edge_prob[4] == 1.0);
  CHECK(t10.value[4] == base);
  CHECK(t10.edge_prob[5] == 0.0);
  CHECK(t10.value[5] == both);
  CHECK(t10.edge_prob[6] == 1.0);
  CHECK(t10.value[6] == second);

  for (const auto& tree : trees) CHECK(martingale_check(tree, 1e-15));
}

TEST_CASE("all orderings are martingales and walk the true path consistently") {
  Rng rng(7);
  for (int d : {1, 2, 3}) {
    std::vector<double> mech(1u << d);
    for (double& v : mech) v = rng.uniform();
    const std::uint32_t truth = static_cast<std::uint32_t>(rng.next_u64()) & ((1u << d) - 1u);
    const auto trees = build_learning_trees(mech, d, truth);
    std::size_t expected = 1;
    for (int k = 2; k <= d; ++k) expected *= k;
    REQUIRE(trees.size() == expected);
    for (const auto& tree : trees) {
      CHECK(martingale_check(tree, 1e-15));
      // walking the received-as-true path reproduces the mechanism values
      std::size_t node = 0;
      std::uint32_t known = 0;
      for (int depth = 0; depth < d; ++depth) {
        const int sig = tree.order[depth];
        const bool is_one = (truth >> sig) & 1u;
        node = 2 * node + (is_one ? 1 : 2);
        known |= 1u << sig;
        CHECK(tree.value[node] == mech[known]);
        CHECK(tree.edge_prob[node] == 0.0);
      }
    }
  }

  // constant table: every node equal, trivially a martingale
  const auto flat = build_learning_trees(std::vector<double>(8, 0.4), 3, 0b101u);
  for (const auto& tree : flat) {
    for (double v : tree.value) CHECK(v == 0.4);
    CHECK(martingale_check(tree, 0.0));
  }
}

TEST_CASE("spec validation errors") {
  BooleanMarketSpec bad;
  bad.num_bits = 2;
  bad.num_experts = 1;  // fewer experts than bits
  bad.measure = {{0, 0, 1.0}};
  bad.real_state = 0;
  CHECK_THROWS_AS(run_boolean_market(bad), std::invalid_argument);

  BooleanMarketSpec unreal;
  unreal.num_bits = 2;
  unreal.num_experts = 2;
  unreal.measure = {{0, 0, 1.0}};
  unreal.real_state = 3;  // zero probability
  CHECK_THROWS_AS(run_boolean_market(unreal), std::invalid_argument);

  BooleanMarketSpec inconsistent;
  inconsistent.num_bits = 2;
  inconsistent.num_experts = 2;
  inconsistent.truth_table = std::vector<int>{0, 1, 1, 0};
  inconsistent.measure = {{1, 0, 1.0}};  // omega != g(s)
  inconsistent.real_state = 0;
  CHECK_THROWS_AS(run_boolean_market(inconsistent), std::invalid_argument);
}
