#include "pmkt/knowledge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pmkt {

namespace {

constexpr double kPriceTol = 1e-12;

void validate_spec(const BooleanMarketSpec& spec) {
  if (spec.num_bits < 1 || spec.num_bits > 20) {
    throw std::invalid_argument("signal dimension out of range");
  }
  if (spec.num_experts < spec.num_bits) {
    throw std::invalid_argument("need at least one expert per signal bit");
  }
  double total = 0.0;
  const std::uint32_t limit = 1u << spec.num_bits;
  for (const World& w : spec.measure) {
    if (w.signals >= limit) throw std::invalid_argument("world outside the signal space");
    if (w.omega != 0 && w.omega != 1) throw std::invalid_argument("omega must be 0 or 1");
    if (w.probability < 0.0) throw std::invalid_argument("negative probability");
    total += w.probability;
    if (spec.truth_table && w.probability > 0.0) {
      if (spec.truth_table->size() != limit) {
        throw std::invalid_argument("truth table size must be 2^d");
      }
      if ((*spec.truth_table)[w.signals] != w.omega) {
        throw std::invalid_argument("measure puts mass on omega != g(s)");
      }
    }
  }
  if (std::fabs(total - 1.0) > 1e-6) throw std::invalid_argument("measure must sum to 1");
}

struct Marginals {
  std::vector<double> mass;      // P(s)
  std::vector<double> positive;  // P(omega=1, s)
};

Marginals signal_marginals(const BooleanMarketSpec& spec) {
  Marginals m;
  m.mass.assign(1u << spec.num_bits, 0.0);
  m.positive.assign(1u << spec.num_bits, 0.0);
  for (const World& w : spec.measure) {
    m.mass[w.signals] += w.probability;
    m.positive[w.signals] += w.probability * w.omega;
  }
  return m;
}

// Mean belief across all experts, in the hypothetical world `state`.
double clearing_price(const BooleanMarketSpec& spec, const Marginals& m,
                      const std::vector<std::uint32_t>& worlds, std::uint32_t state) {
  double pool_mass = 0.0, pool_pos = 0.0;
  for (std::uint32_t s : worlds) {
    pool_mass += m.mass[s];
    pool_pos += m.positive[s];
  }
  if (pool_mass <= 0.0) throw std::logic_error("conditioning on a zero-probability world set");
  const double public_belief = pool_pos / pool_mass;

  double sum = 0.0;
  for (int n = 0; n < spec.num_experts; ++n) {
    if (n >= spec.num_bits) {
      sum += public_belief;
      continue;
    }
    const std::uint32_t own = (state >> n) & 1u;
    double mass = 0.0, pos = 0.0;
    for (std::uint32_t s : worlds) {
      if (((s >> n) & 1u) == own) {
        mass += m.mass[s];
        pos += m.positive[s];
      }
    }
    if (mass <= 0.0) throw std::logic_error("conditioning on a zero-probability private set");
    sum += pos / mass;
  }
  return sum / spec.num_experts;
}

std::vector<double> expert_beliefs(const BooleanMarketSpec& spec, const Marginals& m,
                                   const std::vector<std::uint32_t>& worlds,
                                   std::uint32_t state) {
  std::vector<double> beliefs(spec.num_experts);
  double pool_mass = 0.0, pool_pos = 0.0;
  for (std::uint32_t s : worlds) {
    pool_mass += m.mass[s];
    pool_pos += m.positive[s];
  }
  const double public_belief = pool_pos / pool_mass;
  for (int n = 0; n < spec.num_experts; ++n) {
    if (n >= spec.num_bits) {
      beliefs[n] = public_belief;
      continue;
    }
    const std::uint32_t own = (state >> n) & 1u;
    double mass = 0.0, pos = 0.0;
    for (std::uint32_t s : worlds) {
      if (((s >> n) & 1u) == own) {
        mass += m.mass[s];
        pos += m.positive[s];
      }
    }
    beliefs[n] = pos / mass;
  }
  return beliefs;
}

// ---- dense two-phase simplex (minimize c.x, A x = b, x >= 0) ----

constexpr double kLpTol = 1e-9;

struct LpProblem {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;  // row-major rows x cols
  std::vector<double> b;
  std::vector<double> c;
  double& at(std::size_t r, std::size_t col) { return a[r * cols + col]; }
};

struct LpSolution {
  bool feasible = false;
  std::vector<double> x;
};

// Bland's rule throughout: entering = lowest eligible index, leaving = lowest
// basis index among minimal ratios. Slow but cycle-free and deterministic.
class SimplexTableau {
 public:
  SimplexTableau(const LpProblem& p, std::size_t num_artificial)
      : rows_(p.rows), cols_(p.cols + num_artificial), tab_(rows_ * (cols_ + 1), 0.0),
        basis_(rows_) {
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < p.cols; ++c) at(r, c) = p.a[r * p.cols + c];
      at(r, cols_) = p.b[r];
      const std::size_t art = p.cols + r;
      at(r, art) = 1.0;
      basis_[r] = art;
    }
    num_structural_ = p.cols;
  }

  bool run_phase(const std::vector<double>& cost) {
    std::vector<double> reduced(cols_ + 1);
    while (true) {
      // reduced costs from the current basis
      std::vector<double> basis_cost(rows_);
      for (std::size_t r = 0; r < rows_; ++r) basis_cost[r] = cost[basis_[r]];
      std::size_t entering = cols_;
      for (std::size_t c = 0; c < cols_; ++c) {
        double red = cost[c];
        for (std::size_t r = 0; r < rows_; ++r) red -= basis_cost[r] * at(r, c);
        reduced[c] = red;
        if (red < -kLpTol && entering == cols_) entering = c;
      }
      if (entering == cols_) return true;  // optimal
      std::size_t leaving = rows_;
      double best_ratio = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (at(r, entering) > kLpTol) {
          const double ratio = at(r, cols_) / at(r, entering);
          if (leaving == rows_ || ratio < best_ratio - kLpTol ||
              (ratio < best_ratio + kLpTol && basis_[r] < basis_[leaving])) {
            leaving = r;
            best_ratio = ratio;
          }
        }
      }
      if (leaving == rows_) return false;  // unbounded
      pivot(leaving, entering);
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) at(r, j) /= p;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double factor = at(i, c);
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= factor * at(r, j);
    }
    basis_[r] = c;
  }

  double objective(const std::vector<double>& cost) const {
    double v = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) v += cost[basis_[r]] * tab_[r * (cols_ + 1) + cols_];
    return v;
  }

  LpSolution extract() const {
    LpSolution s;
    s.feasible = true;
    s.x.assign(num_structural_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < num_structural_) s.x[basis_[r]] = tab_[r * (cols_ + 1) + cols_];
    }
    return s;
  }

  std::size_t cols() const { return cols_; }
  std::size_t structural() const { return num_structural_; }

 private:
  double& at(std::size_t r, std::size_t c) { return tab_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return tab_[r * (cols_ + 1) + c]; }

  std::size_t rows_, cols_;
  std::vector<double> tab_;
  std::vector<std::size_t> basis_;
  std::size_t num_structural_;
};

LpSolution solve_lp_min(const LpProblem& p) {
  SimplexTableau tableau(p, p.rows);
  std::vector<double> phase1(tableau.cols(), 0.0);
  for (std::size_t c = p.cols; c < tableau.cols(); ++c) phase1[c] = 1.0;
  if (!tableau.run_phase(phase1)) return {};
  if (tableau.objective(phase1) > 1e-7) return {};  // infeasible

  std::vector<double> phase2(tableau.cols(), 0.0);
  for (std::size_t c = 0; c < p.cols; ++c) phase2[c] = p.c[c];
  // artificials stay priced out of the basis
  for (std::size_t c = p.cols; c < tableau.cols(); ++c) phase2[c] = 1e9;
  if (!tableau.run_phase(phase2)) return {};
  return tableau.extract();
}

}  // namespace

BooleanMarketResult run_boolean_market(const BooleanMarketSpec& spec) {
  validate_spec(spec);
  const Marginals m = signal_marginals(spec);
  if (m.mass[spec.real_state] <= 0.0) {
    throw std::invalid_argument("the real state must have positive probability");
  }

  std::vector<std::uint32_t> worlds;
  for (std::uint32_t s = 0; s < m.mass.size(); ++s) {
    if (m.mass[s] > 0.0) worlds.push_back(s);
  }

  BooleanMarketResult result;
  const std::size_t max_rounds = worlds.size() + 1;
  for (std::size_t k = 1; k <= max_rounds; ++k) {
    const double price = clearing_price(spec, m, worlds, spec.real_state);
    result.log.push_back({expert_beliefs(spec, m, worlds, spec.real_state), price, worlds.size()});

    std::vector<std::uint32_t> kept;
    for (std::uint32_t s : worlds) {
      if (std::fabs(clearing_price(spec, m, worlds, s) - price) <= kPriceTol) kept.push_back(s);
    }
    if (kept.size() == worlds.size()) {
      result.rounds = static_cast<int>(k);
      result.final_price = price;
      result.final_worlds = worlds;
      double pool_mass = 0.0, pool_pos = 0.0;
      for (std::uint32_t s : worlds) {
        pool_mass += m.mass[s];
        pool_pos += m.positive[s];
      }
      const double public_belief = pool_pos / pool_mass;
      result.final_identity = std::fabs(price - public_belief) <= kPriceTol;
      for (double b : result.log.back().beliefs) {
        result.final_identity = result.final_identity && std::fabs(b - price) <= kPriceTol;
      }
      return result;
    }
    worlds = std::move(kept);
  }
  throw std::logic_error("boolean market failed to stabilize");
}

std::optional<std::vector<double>> threshold_weights(const std::vector<int>& truth_table,
                                                     int num_bits) {
  if (num_bits < 1 || num_bits > 5) {
    throw std::invalid_argument("threshold search supports at most 5 inputs");
  }
  const std::size_t states = 1u << num_bits;
  if (truth_table.size() != states) throw std::invalid_argument("truth table size must be 2^d");

  // Variables: u_0..u_d, v_0..v_d (w_i = u_i - v_i), delta; all nonnegative.
  // Maximize delta subject to
  //   g(s)=1: w0 + sum w_i s_i - surplus = 1
  //   g(s)=0: w0 + sum w_i s_i + delta + slack = 1
  //   u_i, v_i <= bound, delta <= 1.
  const std::size_t d1 = static_cast<std::size_t>(num_bits) + 1;
  const std::size_t n_struct = 2 * d1 + 1;
  const double bound = 64.0;

  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  auto add_row = [&](const std::vector<double>& coeffs, double b) {
    rows.push_back(coeffs);
    rhs.push_back(b);
  };

  std::size_t n_slack = 0;
  std::vector<double> slack_sign;
  for (std::size_t s = 0; s < states; ++s) {
    std::vector<double> row(n_struct, 0.0);
    row[0] = 1.0;
    row[d1] = -1.0;
    for (int i = 0; i < num_bits; ++i) {
      if (s & (1u << i)) {
        row[1 + i] = 1.0;
        row[d1 + 1 + i] = -1.0;
      }
    }
    if (truth_table[s]) {
      slack_sign.push_back(-1.0);  // surplus
    } else {
      row[2 * d1] = 1.0;  // + delta
      slack_sign.push_back(1.0);
    }
    add_row(row, 1.0);
    ++n_slack;
  }
  for (std::size_t i = 0; i < 2 * d1; ++i) {
    std::vector<double> row(n_struct, 0.0);
    row[i] = 1.0;
    slack_sign.push_back(1.0);
    add_row(row, bound);
    ++n_slack;
  }
  {
    std::vector<double> row(n_struct, 0.0);
    row[2 * d1] = 1.0;
    slack_sign.push_back(1.0);
    add_row(row, 1.0);
    ++n_slack;
  }

  LpProblem p;
  p.rows = rows.size();
  p.cols = n_struct + n_slack;
  p.a.assign(p.rows * p.cols, 0.0);
  p.b = rhs;
  p.c.assign(p.cols, 0.0);
  p.c[2 * d1] = -1.0;  // maximize delta
  for (std::size_t r = 0; r < p.rows; ++r) {
    for (std::size_t c = 0; c < n_struct; ++c) p.at(r, c) = rows[r][c];
    p.at(r, n_struct + r) = slack_sign[r];
  }

  const LpSolution sol = solve_lp_min(p);
  if (!sol.feasible) return std::nullopt;
  const double delta = sol.x[2 * d1];
  if (delta < 1e-7) return std::nullopt;

  std::vector<double> weights(d1);
  for (std::size_t i = 0; i < d1; ++i) weights[i] = sol.x[i] - sol.x[d1 + i];
  // defensive: the weights must reproduce the table
  for (std::size_t s = 0; s < states; ++s) {
    double acc = weights[0];
    for (int i = 0; i < num_bits; ++i) {
      if (s & (1u << i)) acc += weights[1 + i];
    }
    if ((acc >= 1.0 - 1e-7) != (truth_table[s] != 0)) return std::nullopt;
  }
  return weights;
}

XorCondition check_xor_condition(const BooleanMarketSpec& spec) {
  if (spec.num_bits != 2) throw std::invalid_argument("xor condition needs exactly 2 bits");
  validate_spec(spec);
  const Marginals m = signal_marginals(spec);
  double first = 0.0, second = 0.0;
  for (std::uint32_t s = 0; s < 4; ++s) {
    if (s & 1u) first += m.mass[s];
    if (s & 2u) second += m.mass[s];
  }
  XorCondition out;
  out.uniform_marginals = std::fabs(first - 0.5) <= kPriceTol && std::fabs(second - 0.5) <= kPriceTol;
  out.predicted_stall = out.uniform_marginals;
  return out;
}

IrrelevanceFlags verify_irrelevance_lemma(const KnowledgeStructure& structure,
                                          std::uint32_t common_core) {
  const int n = structure.num_signals;
  if (n < 0 || n > 12) throw std::invalid_argument("signal set too large to enumerate");
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
  if ((common_core & ~full) != 0) throw std::invalid_argument("core is not a subset of the signals");
  if (structure.endowments.empty() || structure.endowments.size() != structure.mechanisms.size()) {
    throw std::invalid_argument("one endowment and one mechanism per expert required");
  }
  std::uint32_t covered = 0;
  for (std::uint32_t e : structure.endowments) {
    if ((e & ~full) != 0) throw std::invalid_argument("endowment outside the signal set");
    covered |= e;
  }
  if (covered != full) {
    throw std::invalid_argument("every signal must belong to some expert's endowment");
  }
  for (const auto& mech : structure.mechanisms) {
    if (mech.size() != (std::size_t{1} << n)) {
      throw std::invalid_argument("mechanism table must cover the signal powerset");
    }
  }

  const std::size_t experts = structure.endowments.size();
  const double tol = 1e-12;

  bool stepwise = true;
  const std::uint32_t comp = full & ~common_core;
  for (std::uint32_t t = 0;; t = (t - comp) & comp) {
    const std::uint32_t sub_structure = common_core | t;
    for (std::uint32_t known = 0;; known = (known - sub_structure) & sub_structure) {
      const double ref =
          structure.mechanisms[0][(structure.endowments[0] & ~sub_structure) | known];
      for (std::size_t e = 1; e < experts && stepwise; ++e) {
        const double val =
            structure.mechanisms[e][(structure.endowments[e] & ~sub_structure) | known];
        if (std::fabs(val - ref) > tol) stepwise = false;
      }
      if (!stepwise || known == sub_structure) break;
    }
    if (!stepwise || t == comp) break;
  }

  bool endpoint = true;
  for (std::uint32_t known = 0; endpoint; ++known) {
    for (std::size_t e = 1; e < experts; ++e) {
      if (std::fabs(structure.mechanisms[e][known] - structure.mechanisms[0][known]) > tol) {
        endpoint = false;
        break;
      }
    }
    if (known == full) break;
  }
  if (endpoint) {
    for (int bit = 0; bit < n && endpoint; ++bit) {
      const std::uint32_t mask = 1u << bit;
      if (common_core & mask) continue;
      bool common = true;
      for (std::uint32_t e : structure.endowments) common = common && (e & mask);
      if (common) continue;
      for (std::uint32_t known = 0; endpoint; ++known) {
        if (std::fabs(structure.mechanisms[0][known | mask] - structure.mechanisms[0][known]) >
            tol) {
          endpoint = false;
        }
        if (known == full) break;
      }
    }
  }
  return {stepwise, endpoint};
}

std::vector<LearningTree> build_learning_trees(const std::vector<double>& mechanism,
                                               int num_signals,
                                               std::uint32_t true_assignment) {
  if (num_signals < 1 || num_signals > 8) {
    throw std::invalid_argument("learning trees support 1..8 signals");
  }
  if (mechanism.size() != (std::size_t{1} << num_signals)) {
    throw std::invalid_argument("mechanism table must cover the signal powerset");
  }

  std::vector<int> order(num_signals);
  std::iota(order.begin(), order.end(), 0);

  const std::size_t nodes = (std::size_t{2} << num_signals) - 1;
  std::vector<LearningTree> trees;
  do {
    LearningTree tree;
    tree.order = order;
    tree.value.assign(nodes, 0.0);
    tree.edge_prob.assign(nodes, 0.0);
    tree.known.assign(nodes, 0u);
    tree.value[0] = mechanism[0];
    const std::size_t internal = (std::size_t{1} << num_signals) - 1;
    for (std::size_t k = 0; k < internal; ++k) {
      int depth = 0;
      for (std::size_t idx = k + 1; idx > 1; idx >>= 1) ++depth;
      const int sig = order[depth];
      const std::uint32_t truth = (true_assignment >> sig) & 1u;
      for (std::uint32_t received : {1u, 0u}) {
        const std::size_t child = 2 * k + (received ? 1 : 2);
        const bool consistent = received == truth;
        tree.edge_prob[child] = consistent ? 0.0 : 1.0;
        tree.known[child] = consistent ? (tree.known[k] | (1u << sig)) : tree.known[k];
        tree.value[child] = mechanism[tree.known[child]];
      }
    }
    trees.push_back(std::move(tree));
  } while (std::next_permutation(order.begin(), order.end()));
  return trees;
}

bool martingale_check(const LearningTree& tree, double tol) {
  const std::size_t internal = (tree.value.size() - 1) / 2;
  for (std::size_t k = 0; k < internal; ++k) {
    const double expected = tree.edge_prob[2 * k + 1] * tree.value[2 * k + 1] +
                            tree.edge_prob[2 * k + 2] * tree.value[2 * k + 2];
    if (std::fabs(tree.value[k] - expected) > tol) return false;
  }
  return true;
}

}  // namespace pmkt
