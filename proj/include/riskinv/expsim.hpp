#ifndef RISKINV_EXPSIM_HPP
#define RISKINV_EXPSIM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "riskinv/errors.hpp"
#include "riskinv/rational.hpp"
#include "riskinv/utility.hpp"

namespace riskinv {

// Investment games played with an endowment of 150 in steps of 30. Every
// option has expected final wealth endowment + 0.5 * invested.

/// Each unit invested adds one winning face on a six-sided die; a win pays
/// a fixed reward.
struct ProbabilityGame {
  std::int64_t endowment = 150;
  std::int64_t unit = 30;
  std::int64_t reward = 270;
  std::int64_t faces = 6;
  std::int64_t max_units = 5;
};

/// Win probability is fixed; a win returns the invested amount times multiplier.
struct RewardGame {
  std::int64_t endowment = 150;
  std::int64_t unit = 30;
  std::int64_t multiplier = 3;
  Rational p{1, 2};
  std::int64_t max_units = 5;
};

/// Starts with one unit invested on a one-face die paying start_reward; each
/// of `steps` further units either adds a face (P) or raises the reward (R)
/// with the expected return held equal.
struct StepGame {
  std::int64_t endowment = 150;
  std::int64_t unit = 30;
  std::int64_t start_reward = 270;
  std::int64_t faces = 6;
  std::int64_t steps = 4;
};

using GameSpec = std::variant<ProbabilityGame, RewardGame, StepGame>;

inline std::string game_name(const GameSpec& g) {
  if (std::holds_alternative<ProbabilityGame>(g)) return "probability";
  if (std::holds_alternative<RewardGame>(g)) return "reward";
  return "step";
}

/// One choosable lottery, exact in rationals. Final wealth is win or lose on
/// top of any outside wealth.
struct GameOption {
  std::string label;
  Rational invested;
  Rational p;
  Rational win;
  Rational lose;

  Rational mean() const { return p * win + (Rational(1) - p) * lose; }
  BinaryLottery lottery(double outside_wealth = 0.0) const {
    return {p.to_double(), outside_wealth + win.to_double(), outside_wealth + lose.to_double()};
  }
};

/// Node of the step-by-step game after t further steps with s winning faces.
struct StepNode {
  std::int64_t t = 0;
  std::int64_t s = 1;
  Rational invested;
  Rational probability;
  Rational reward;
};

/// reward = start_reward (t+1) / s keeps probability * reward equal to
/// 1.5 * invested at every node.
inline StepNode step_node(const StepGame& g, std::int64_t t, std::int64_t s) {
  detail::require(t >= 0 && t <= g.steps && s >= 1 && s <= t + 1 && s <= g.faces, "invalid step-game node");
  return {t, s, Rational(g.unit * (t + 1)), Rational(s, g.faces), Rational(g.start_reward * (t + 1), s)};
}

inline GameOption node_option(const StepGame& g, const StepNode& n, std::string label) {
  const Rational kept = Rational(g.endowment) - n.invested;
  return {std::move(label), n.invested, n.probability, kept + n.reward, kept};
}

inline std::int64_t count_probability_picks(const std::string& path, std::size_t upto = std::string::npos) {
  return std::count(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(std::min(upto, path.size())), 'P');
}

inline std::vector<GameOption> enumerate_options(const GameSpec& game) {
  std::vector<GameOption> out;
  if (auto* g = std::get_if<ProbabilityGame>(&game)) {
    for (std::int64_t k = 0; k <= g->max_units; ++k) {
      const Rational inv(g->unit * k);
      const Rational kept = Rational(g->endowment) - inv;
      out.push_back({"stars=" + std::to_string(k), inv, Rational(k, g->faces), kept + Rational(g->reward), kept});
    }
  } else if (auto* g = std::get_if<RewardGame>(&game)) {
    for (std::int64_t k = 0; k <= g->max_units; ++k) {
      const Rational inv(g->unit * k);
      const Rational kept = Rational(g->endowment) - inv;
      out.push_back({"c=" + std::to_string(g->unit * k), inv, g->p, kept + inv * Rational(g->multiplier), kept});
    }
  } else {
    const auto& sg = std::get<StepGame>(game);
    const std::int64_t leaves = std::int64_t{1} << sg.steps;
    for (std::int64_t mask = 0; mask < leaves; ++mask) {
      std::string path;
      for (std::int64_t i = sg.steps - 1; i >= 0; --i) path.push_back((mask >> i) & 1 ? 'R' : 'P');
      const StepNode n = step_node(sg, sg.steps, 1 + count_probability_picks(path));
      out.push_back(node_option(sg, n, path));
    }
  }
  return out;
}

/// Final stage of the step game: invest n = 1..steps+1 units at the node the
/// chosen path reached after n - 1 steps.
inline std::vector<GameOption> step_final_options(const StepGame& g, const std::string& path) {
  detail::require(static_cast<std::int64_t>(path.size()) == g.steps, "path length must equal steps");
  std::vector<GameOption> out;
  for (std::int64_t n = 1; n <= g.steps + 1; ++n) {
    const StepNode node = step_node(g, n - 1, 1 + count_probability_picks(path, static_cast<std::size_t>(n - 1)));
    out.push_back(node_option(g, node, "n=" + std::to_string(n)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Risk elicitation menu: 50% chance of 1300 against a sure amount rising from
// 0 to 1000 in steps of 100.

inline constexpr int kElicitationRows = 11;

/// First 1-based row whose sure amount beats the lottery; kElicitationRows + 1
/// when the lottery is always kept. Rows 1..7 classify as risk averse.
inline int elicitation_switch_row(const RiskPreference& pref, double outside_wealth = 0.0) {
  const BinaryLottery lot{0.5, outside_wealth + 1300.0, outside_wealth};
  const double ce = certainty_equivalent(pref, lot);
  for (int row = 1; row <= kElicitationRows; ++row) {
    const double safe = outside_wealth + 100.0 * (row - 1);
    if (pref.is_crra() && !(safe > 0.0)) continue;
    if (safe > ce) return row;
  }
  return kElicitationRows + 1;
}

inline bool elicited_risk_averse(int switch_row) { return switch_row <= 7; }

// ---------------------------------------------------------------------------
// Synthetic populations.

struct CaraLogUniform {
  double lo = 1e-4;
  double hi = 5e-2;
};

struct CrraGrid {
  std::vector<double> sigmas;
};

struct WealthSampler {
  enum class Kind { None, Constant, Uniform };
  Kind kind = Kind::None;
  double a = 0.0;
  double b = 0.0;
};

struct AgentPopulation {
  std::size_t n = 1000;
  std::variant<CaraLogUniform, CrraGrid> preferences = CaraLogUniform{};
  WealthSampler wealth;
  std::uint64_t seed = 1;

  void validate() const {
    if (auto* c = std::get_if<CaraLogUniform>(&preferences)) {
      detail::require(c->lo > 0.0 && c->hi >= c->lo, "cara log-uniform bounds need 0 < lo <= hi");
    } else {
      const auto& g = std::get<CrraGrid>(preferences);
      detail::require(!g.sigmas.empty(), "crra grid must be non-empty");
      for (double s : g.sigmas) detail::require(s > 0.0, "crra sigma must be > 0");
      const double w_min = wealth.kind == WealthSampler::Kind::None ? 0.0 : wealth.a;
      detail::require(w_min > 0.0, "crra agents need positive outside wealth (some game outcomes are 0)");
    }
    if (wealth.kind == WealthSampler::Kind::Uniform)
      detail::require(wealth.b >= wealth.a, "uniform wealth needs lo <= hi");
  }
};

struct Agent {
  std::size_t id = 0;
  RiskPreference pref = RiskPreference::linear();
  double outside_wealth = 0.0;
  int elicitation_row = 0;
  bool risk_averse = false;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Agent i is drawn from its own stream seeded by (seed, i), so any subset of
/// agents can be generated independently and in any order.
inline Agent make_agent(const AgentPopulation& pop, std::size_t id) {
  std::mt19937_64 rng(detail::splitmix64(pop.seed ^ detail::splitmix64(id)));
  Agent a;
  a.id = id;
  if (auto* c = std::get_if<CaraLogUniform>(&pop.preferences)) {
    const double u = detail::unit_uniform(rng);
    a.pref = RiskPreference::cara(std::exp(std::log(c->lo) + u * (std::log(c->hi) - std::log(c->lo))));
  } else {
    const auto& g = std::get<CrraGrid>(pop.preferences);
    a.pref = RiskPreference::crra(g.sigmas[rng() % g.sigmas.size()]);
  }
  switch (pop.wealth.kind) {
    case WealthSampler::Kind::None: a.outside_wealth = 0.0; break;
    case WealthSampler::Kind::Constant: a.outside_wealth = pop.wealth.a; break;
    case WealthSampler::Kind::Uniform:
      a.outside_wealth = pop.wealth.a + (pop.wealth.b - pop.wealth.a) * detail::unit_uniform(rng);
      break;
  }
  a.elicitation_row = elicitation_switch_row(a.pref, a.outside_wealth);
  a.risk_averse = elicited_risk_averse(a.elicitation_row);
  return a;
}

// ---------------------------------------------------------------------------
// Choices.

struct ChoiceRecord {
  std::size_t agent_id = 0;
  std::string game;
  std::string option;
  double invested = 0.0;
  double eu = 0.0;  // raw expected utility of the chosen option
};

struct StepChoice {
  std::size_t agent_id = 0;
  std::string myopic_path;   // node-by-node choice
  std::string argmax_path;   // best leaf over all paths
  std::int64_t final_units = 0;
  std::int64_t probability_picks = 0;  // 'P' count on the myopic path
};

// Options are ranked by certainty equivalent, which orders them exactly as
// expected utility does but stays resolvable where utility levels saturate.
// |a - b| within 1e-12 relative counts as indifference.
inline double option_value(const Agent& agent, const GameOption& o) {
  return certainty_equivalent(agent.pref, o.lottery(agent.outside_wealth));
}

inline bool eu_tie(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Index of the EU-maximizing option; ties go to the larger investment.
inline std::size_t best_option(const std::vector<GameOption>& opts, const Agent& agent) {
  std::size_t best = 0;
  double best_eu = option_value(agent, opts[0]);
  for (std::size_t i = 1; i < opts.size(); ++i) {
    const double eu = option_value(agent, opts[i]);
    const bool tie = eu_tie(eu, best_eu);
    if ((!tie && eu > best_eu) || (tie && opts[i].invested > opts[best].invested)) {
      best = i;
      best_eu = eu;
    }
  }
  return best;
}

inline StepChoice play_step_game(const StepGame& g, const Agent& agent) {
  StepChoice out;
  out.agent_id = agent.id;
  auto eu_of = [&](const StepNode& n) {
    return option_value(agent, node_option(g, n, ""));
  };
  // Node by node; indifference goes to P by convention.
  std::int64_t s = 1;
  for (std::int64_t t = 0; t < g.steps; ++t) {
    const double with_face = eu_of(step_node(g, t + 1, s + 1));
    const double with_reward = eu_of(step_node(g, t + 1, s));
    if (with_face > with_reward || eu_tie(with_face, with_reward)) {
      out.myopic_path.push_back('P');
      ++s;
    } else {
      out.myopic_path.push_back('R');
    }
  }
  // Whole-path argmax; ties prefer more P, then the lexicographically first path.
  const auto leaves = enumerate_options(g);
  std::size_t best = 0;
  double best_eu = option_value(agent, leaves[0]);
  for (std::size_t i = 1; i < leaves.size(); ++i) {
    const double eu = option_value(agent, leaves[i]);
    const bool tie = eu_tie(eu, best_eu);
    if ((!tie && eu > best_eu) ||
        (tie && count_probability_picks(leaves[i].label) > count_probability_picks(leaves[best].label))) {
      best = i;
      best_eu = eu;
    }
  }
  out.argmax_path = leaves[best].label;
  out.probability_picks = count_probability_picks(out.myopic_path);
  const auto finals = step_final_options(g, out.myopic_path);
  out.final_units = static_cast<std::int64_t>(best_option(finals, agent)) + 1;
  return out;
}

struct GameSummary {
  std::string game;
  std::size_t n = 0;
  std::map<double, double> invested_shares;  // invested amount -> share of agents
  double mean_invested = 0.0;
  double variance_invested = 0.0;  // sample variance (n - 1)
  double corner_mass = 0.0;        // share at the two lowest or two highest amounts
};

struct StepBranchReport {
  std::size_t n = 0;
  std::array<double, 5> pick_count_shares{};  // share of agents with 0..4 P picks
  std::vector<double> node_probability_share;  // per step, share choosing P
  double probability_share = 0.0;               // P picks over all decisions
  double myopic_matches_argmax = 0.0;           // share whose two paths agree
  std::map<std::int64_t, double> final_units_shares;
};

struct SimulationResult {
  std::vector<Agent> agents;
  std::vector<ChoiceRecord> records;
  std::vector<StepChoice> step_choices;
};

inline std::vector<ChoiceRecord> records_for(const std::vector<ChoiceRecord>& all, const std::string& game) {
  std::vector<ChoiceRecord> out;
  for (const auto& r : all)
    if (r.game == game) out.push_back(r);
  return out;
}

/// Every agent plays every listed game, choosing the expected-utility maximum.
/// Records are ordered by game, then agent id.
inline SimulationResult simulate(const std::vector<GameSpec>& games, const AgentPopulation& pop) {
  pop.validate();
  SimulationResult res;
  res.agents.reserve(pop.n);
  for (std::size_t i = 0; i < pop.n; ++i) res.agents.push_back(make_agent(pop, i));

  for (const auto& game : games) {
    if (auto* sg = std::get_if<StepGame>(&game)) {
      std::vector<ChoiceRecord> finals;
      for (const auto& a : res.agents) {
        StepChoice sc = play_step_game(*sg, a);
        const auto leaves = enumerate_options(*sg);
        const auto leaf = std::find_if(leaves.begin(), leaves.end(),
                                       [&](const GameOption& o) { return o.label == sc.myopic_path; });
        res.records.push_back({a.id, "step", sc.myopic_path, leaf->invested.to_double(),
                               expected_utility(a.pref, leaf->lottery(a.outside_wealth))});
        const auto fo = step_final_options(*sg, sc.myopic_path)[static_cast<std::size_t>(sc.final_units - 1)];
        finals.push_back({a.id, "step_final", fo.label, fo.invested.to_double(),
                          expected_utility(a.pref, fo.lottery(a.outside_wealth))});
        res.step_choices.push_back(std::move(sc));
      }
      res.records.insert(res.records.end(), finals.begin(), finals.end());
    } else {
      const auto opts = enumerate_options(game);
      const std::string name = game_name(game);
      for (const auto& a : res.agents) {
        const auto& o = opts[best_option(opts, a)];
        res.records.push_back({a.id, name, o.label, o.invested.to_double(),
                               expected_utility(a.pref, o.lottery(a.outside_wealth))});
      }
    }
  }
  return res;
}

inline SimulationResult simulate(const GameSpec& game, const AgentPopulation& pop) {
  return simulate(std::vector<GameSpec>{game}, pop);
}

namespace detail {

inline double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

}  // namespace detail

/// Option shares, dispersion and corner mass of one game's records. The
/// corners are the two smallest and two largest of `grid` (default: the
/// amounts that occur in the records).
inline GameSummary summarize(const std::vector<ChoiceRecord>& records, std::vector<double> grid = {}) {
  GameSummary s;
  s.n = records.size();
  if (!records.empty()) s.game = records.front().game;
  if (grid.empty())
    for (const auto& r : records) grid.push_back(r.invested);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (double g : grid) s.invested_shares[g] = 0.0;
  std::vector<double> xs;
  for (const auto& r : records) {
    s.invested_shares[r.invested] += 1.0;
    xs.push_back(r.invested);
  }
  if (s.n == 0) return s;
  for (auto& [k, v] : s.invested_shares) v /= static_cast<double>(s.n);
  for (double x : xs) s.mean_invested += x;
  s.mean_invested /= static_cast<double>(s.n);
  s.variance_invested = detail::sample_variance(xs);
  std::vector<double> corners;
  const std::size_t m = grid.size();
  for (std::size_t i = 0; i < m; ++i)
    if (i < 2 || i + 2 >= m) corners.push_back(grid[i]);
  for (double c : corners) s.corner_mass += s.invested_shares[c];
  return s;
}

struct DispersionReport {
  double variance_probability = 0.0;
  double variance_reward = 0.0;
  double levene_w = 0.0;  // mean-centred Levene statistic, 2 groups
  double corner_mass_probability = 0.0;
  double corner_mass_reward = 0.0;
  std::map<double, double> share_difference;  // probability share minus reward share
};

/// Contrasts invested amounts of the same agents in the probability and
/// reward games.
inline DispersionReport dispersion_compare(const std::vector<ChoiceRecord>& prob,
                                           const std::vector<ChoiceRecord>& reward) {
  auto ids = [](const std::vector<ChoiceRecord>& rs) {
    std::vector<std::size_t> v;
    for (const auto& r : rs) v.push_back(r.agent_id);
    std::sort(v.begin(), v.end());
    return v;
  };
  if (ids(prob) != ids(reward)) throw ArgumentError("dispersion_compare: record sets cover different agents");
  detail::require(prob.size() >= 2, "dispersion_compare: need at least two agents");

  std::vector<double> grid;
  for (const auto* rs : {&prob, &reward})
    for (const auto& r : *rs) grid.push_back(r.invested);
  const GameSummary sp = summarize(prob, grid);
  const GameSummary sr = summarize(reward, grid);

  DispersionReport rep;
  rep.variance_probability = sp.variance_invested;
  rep.variance_reward = sr.variance_invested;
  rep.corner_mass_probability = sp.corner_mass;
  rep.corner_mass_reward = sr.corner_mass;
  for (const auto& [amount, share] : sp.invested_shares) rep.share_difference[amount] = share - sr.invested_shares.at(amount);

  // Levene: one-way ANOVA on absolute deviations from the group means.
  std::array<std::vector<double>, 2> z;
  std::array<double, 2> zbar{};
  const std::array<const GameSummary*, 2> sums{&sp, &sr};
  const std::array<const std::vector<ChoiceRecord>*, 2> groups{&prob, &reward};
  double zall = 0.0;
  std::size_t total = 0;
  for (std::size_t g = 0; g < 2; ++g) {
    for (const auto& r : *groups[g]) z[g].push_back(std::abs(r.invested - sums[g]->mean_invested));
    for (double v : z[g]) zbar[g] += v;
    zall += zbar[g];
    total += z[g].size();
    zbar[g] /= static_cast<double>(z[g].size());
  }
  zall /= static_cast<double>(total);
  double between = 0.0, within = 0.0;
  for (std::size_t g = 0; g < 2; ++g) {
    between += static_cast<double>(z[g].size()) * (zbar[g] - zall) * (zbar[g] - zall);
    for (double v : z[g]) within += (v - zbar[g]) * (v - zbar[g]);
  }
  const double numer = static_cast<double>(total - 2) * between;
  if (within > 0.0)
    rep.levene_w = numer / within;
  else
    rep.levene_w = numer > 0.0 ? HUGE_VAL : 0.0;
  return rep;
}

inline StepBranchReport step_branch_shares(const std::vector<StepChoice>& choices) {
  StepBranchReport rep;
  rep.n = choices.size();
  if (choices.empty()) return rep;
  const std::size_t steps = choices.front().myopic_path.size();
  rep.node_probability_share.assign(steps, 0.0);
  std::size_t picks = 0, agree = 0;
  for (const auto& c : choices) {
    const auto k = static_cast<std::size_t>(std::min<std::int64_t>(c.probability_picks, 4));
    rep.pick_count_shares[k] += 1.0;
    for (std::size_t i = 0; i < steps && i < c.myopic_path.size(); ++i)
      if (c.myopic_path[i] == 'P') rep.node_probability_share[i] += 1.0;
    picks += static_cast<std::size_t>(c.probability_picks);
    if (c.myopic_path == c.argmax_path) ++agree;
    rep.final_units_shares[c.final_units] += 1.0;
  }
  const double n = static_cast<double>(rep.n);
  for (auto& v : rep.pick_count_shares) v /= n;
  for (auto& v : rep.node_probability_share) v /= n;
  for (auto& [k, v] : rep.final_units_shares) v /= n;
  rep.probability_share = static_cast<double>(picks) / (n * static_cast<double>(steps));
  rep.myopic_matches_argmax = static_cast<double>(agree) / n;
  return rep;
}

}  // namespace riskinv

#endif  // RISKINV_EXPSIM_HPP
