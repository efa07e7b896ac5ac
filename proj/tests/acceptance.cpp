// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "riskinv/calibrate.hpp"
#include "riskinv/credit.hpp"
#include "riskinv/expsim.hpp"
#include "riskinv/format.hpp"
#include "riskinv/models.hpp"
#include "riskinv/solver.hpp"
#include "support.hpp"

using namespace riskinv;
using testsupport::Gen;
using testsupport::linspace;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;  // keep the first failure
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// 1. CARA probability-model expected utility is U-shaped on [0, p_bar].
Outcome criterion_1() {
  Outcome o;
  const auto t0 = Clock::now();
  Gen g(1001);
  std::size_t worst_changes = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto m = g.probability_model();
    const auto u = RiskPreference::cara(g.log_uniform(1e-3, 5.0));
    std::vector<double> ys;
    for (double p : linspace(0.0, m.p_bar, 10001)) ys.push_back(prob_eu_normalized(m, u, p));
    const auto diag = detail::classify_differences(ys);
    worst_changes = std::max(worst_changes, diag.sign_changes);
    o.check(diag.sign_changes <= 1 && (diag.sign_changes == 0 || diag.pattern == "-+"),
            "model " + std::to_string(i) + " has pattern " + diag.pattern);
  }
  const double secs = seconds_since(t0);
  o.check(secs < 5.0, "runtime " + format_double(secs) + " s");
  if (o.pass) o.detail = "1000 models, max sign changes " + std::to_string(worst_changes) + ", " + format_double(secs) + " s";
  return o;
}

// 2. Risk-aversion threshold exists, converges, and flips the choice.
Outcome criterion_2() {
  Outcome o;
  Gen g(1002);
  for (int i = 0; i < 200; ++i) {
    const auto m = g.probability_model();
    const auto t = lambda_threshold(m);
    o.check(t.hi - t.lo <= 1e-9 * t.hi, "bracket too wide on model " + std::to_string(i));
    o.check(solve_probability(m, RiskPreference::cara(t.threshold * (1 - 1e-3))).argmax == m.p_bar,
            "no p_bar below threshold on model " + std::to_string(i));
    o.check(solve_probability(m, RiskPreference::cara(t.threshold * (1 + 1e-3))).argmax == 0.0,
            "no zero above threshold on model " + std::to_string(i));
  }
  // Spot value against bisection on 0.8 e^{-1.2 lambda} + 0.2 e^{0.8 lambda} = 1.
  const double spot = lambda_threshold(ProbabilityModel{0, 2, 0, 1, 0.8}).threshold;
  const double oracle = testsupport::bisect_root(
      [](double l) { return 0.8 * std::exp(-1.2 * l) + 0.2 * std::exp(0.8 * l) - 1.0; }, 0.5, 10.0);
  o.check(spot > 1.90 && spot < 1.95, "spot threshold " + format_double(spot));
  o.check(std::abs(spot - oracle) <= 1e-8, "spot differs from oracle " + format_double(oracle));
  if (o.pass) o.detail = "200 models flip; spot lambda = " + format_double(spot);
  return o;
}

// 3. Reward-model expected utility is concave; closed-form CARA optimum.
Outcome criterion_3() {
  Outcome o;
  Gen g(1003);
  for (int i = 0; i < 1000; ++i) {
    const auto m = g.reward_model();
    const auto u = g.concave_preference(m.B);
    const double hi = feasible_c_max(m, u);
    std::vector<double> ys;
    double scale = 0.0;
    for (double c : linspace(0.0, hi, 2001)) {
      ys.push_back(reward_eu_normalized(m, u, c));
      scale = std::max(scale, std::abs(ys.back()));
    }
    double worst = -INFINITY;
    for (std::size_t k = 1; k + 1 < ys.size(); ++k) worst = std::max(worst, ys[k + 1] - 2 * ys[k] + ys[k - 1]);
    o.check(worst <= 1e-9 * scale, "positive second difference on model " + std::to_string(i) + " (" + u.describe() + ")");
  }
  RewardModel e;
  e.B = 150;
  e.p = 0.5;
  e.reward = RewardFunction::affine(0, 3, 150);
  for (double lambda : {0.001, 0.003, 0.005, 0.01, 0.05}) {
    const double expect = std::min(150.0, std::log(2.0) / (3 * lambda));
    const double got = solve_reward(e, RiskPreference::cara(lambda)).argmax;
    o.check(std::abs(got - expect) <= 1e-6 * expect, "c* at lambda " + format_double(lambda) + " = " + format_double(got));
  }
  if (o.pass) o.detail = "1000 models concave; c*(0.005) = " + format_double(solve_reward(e, RiskPreference::cara(0.005)).argmax);
  return o;
}

// 4. Higher-probability, lower-reward lottery dominates for concave preferences.
Outcome criterion_4() {
  Outcome o;
  Gen g(1004);
  std::size_t comparisons = 0;
  for (int i = 0; i < 300; ++i) {
    auto h = g.hybrid_project();
    h.L = std::max(h.L, 1.0);
    h.C = std::max(h.C, h.L + 1.0);
    const auto ps = linspace(h.p0, h.p_bar, 8);
    const std::vector<RiskPreference> prefs{RiskPreference::cara(g.log_uniform(1e-3, 0.1)),
                                            RiskPreference::crra(g.uniform(0.2, 4.0))};
    for (std::size_t a = 0; a < ps.size(); ++a)
      for (std::size_t b = 0; b < a; ++b) {
        for (const auto& u : prefs) {
          const auto c = sosd_prefer_probability(h, u, ps[a], ps[b]);
          ++comparisons;
          o.check(c.difference() > 0.0, "not strict for " + u.describe() + " on project " + std::to_string(i));
        }
        const auto lin = sosd_prefer_probability(h, RiskPreference::linear(), ps[a], ps[b]);
        o.check(std::abs(lin.difference()) <= 1e-12, "linear gap " + format_double(lin.difference()));
      }
  }
  if (o.pass) o.detail = std::to_string(comparisons) + " strict comparisons, linear indifferent";
  return o;
}

// 5. CRRA wealth threshold and monotone investment above it.
Outcome criterion_5() {
  Outcome o;
  const auto t0 = Clock::now();
  const ProbabilityModel base{0.0, 5.5, 0.6875, 3.0, 0.8};
  const auto u = RiskPreference::crra(1.0);
  const auto t = wealth_threshold(base, u);
  o.check(std::abs(t.threshold - 1.93) <= 0.02, "B threshold = " + format_double(t.threshold) + ", expected 1.93 +- 0.02");
  double prev = -1.0;
  for (double B : linspace(1.93, 2.40, 100)) {
    auto m = base;
    m.B = B;
    const double p = solve_probability(m, u).argmax;
    o.check(p >= prev, "optimal p decreases at B = " + format_double(B));
    prev = p;
  }
  const double secs = seconds_since(t0);
  o.check(secs < 1.0, "runtime " + format_double(secs) + " s");
  if (o.pass) o.detail = "B threshold = " + format_double(t.threshold);
  return o;
}

// 6. Credit model: continuity, upper-branch slope, reduction, financing dominance.
Outcome criterion_6() {
  Outcome o;
  Gen g(1006);
  for (int i = 0; i < 300; ++i) {
    const auto m = g.credit_model();
    const auto u = g.concave_preference();
    const double k = m.kink();
    if (k <= m.p_bar) {
      const double a = expected_utility(u, credit_branch_lottery(m, k, CreditBranch::SmallLoan));
      const double b = expected_utility(u, credit_branch_lottery(m, k, CreditBranch::LargeLoan));
      o.check(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)), "branch gap at kink, model " + std::to_string(i));
      const auto cara = RiskPreference::cara(g.log_uniform(1e-2, 3.0));
      for (double p : linspace(k, m.p_bar, 1001))
        o.check(credit_large_loan_slope(m, cara, p) > 0.0, "non-positive slope, model " + std::to_string(i));
    }
    for (double p : linspace(0.0, std::min(k, m.p_bar), 50)) {
      if (!(m.alpha * p < m.L)) continue;
      const double c = credit_eu(m, u, p);
      o.check(std::abs(c - prob_eu(m.as_probability_model(), u, p)) <= 1e-12 * std::max(1.0, std::abs(c)),
              "credit and probability model differ, model " + std::to_string(i));
    }
  }
  for (int i = 0; i < 500; ++i) {
    const auto m = g.credit_model();
    const auto u = g.concave_preference();
    const double p = g.uniform(1e-3, m.p_bar);
    const double own = g.uniform(0.0, std::min(m.B, m.alpha * p));
    const auto c = full_loan_dominates(m, u, p, own);
    o.check(c.eu_full_loan - c.eu_mixed >= -1e-12 * std::max(1.0, std::abs(c.eu_mixed)),
            "mixed financing preferred, triple " + std::to_string(i));
  }
  if (o.pass) o.detail = "continuity, slope, reduction and 500 financing triples hold";
  return o;
}

// 7. Calibration on a constructed 540-row fixture.
Outcome criterion_7() {
  Outcome o;
  SyntheticSurveySpec spec;
  for (std::size_t g = 0; g < 30; ++g) spec.successes.push_back(4 + (12 * g + 14) / 29);
  spec.seed = 77;
  const auto records = make_synthetic_survey(spec);
  o.check(records.size() == 540, "fixture size " + std::to_string(records.size()));
  const auto groups = bin_groups(records, 30);
  bool has_min_bin = false;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    o.check(groups[i].n == 18, "group size");
    o.check(groups[i].p_hat == static_cast<double>(spec.successes[i]) / 18.0, "p_hat of group " + std::to_string(i + 1));
    has_min_bin = has_min_bin || groups[i].p_hat == 4.0 / 18.0;
  }
  o.check(has_min_bin, "no 4/18 bin");
  const auto core = fit_gamma(groups, 0.88);
  o.check(std::abs(core.gamma * core.mu_max - 0.88) <= 1e-12 * 0.88, "gamma identity");
  const std::vector<double> sigmas{4.0, 3.0, 2.0, 1.0, 0.5};
  const auto res = predict_curves(core, groups, sigmas, CurveSettings{});
  std::vector<std::size_t> zero_counts;
  for (const auto& c : res.curves) {
    std::size_t z = 0;
    while (z < c.points.size() && c.points[z].optimal_p == 0.0) ++z;
    for (std::size_t k = z; k < c.points.size(); ++k)
      o.check(c.points[k].optimal_p > 0.0, "investment region not contiguous at sigma " + format_double(c.sigma));
    zero_counts.push_back(z);
  }
  o.check(zero_counts.front() > 0, "no no-investment region at sigma 4");
  for (std::size_t k = 1; k < zero_counts.size(); ++k)
    o.check(zero_counts[k] <= zero_counts[k - 1], "region grows as sigma decreases");
  o.check(zero_counts.back() < zero_counts.front(), "region does not shrink");
  if (o.pass) {
    o.detail = "p_hat exact; poorest non-investing groups by sigma 4,3,2,1,0.5:";
    for (auto z : zero_counts) o.detail += " " + std::to_string(z);
  }
  return o;
}

std::string records_csv(const std::vector<ChoiceRecord>& rs) {
  std::ostringstream s;
  for (const auto& r : rs)
    s << r.agent_id << ',' << r.game << ',' << r.option << ',' << format_double(r.invested) << ','
      << format_double(r.eu) << '\n';
  return s.str();
}

// 8. Experimental games: expected values, coincidence, population patterns, determinism.
Outcome criterion_8() {
  Outcome o;
  const auto t0 = Clock::now();
  const std::vector<GameSpec> games{ProbabilityGame{}, RewardGame{}, StepGame{}};
  for (const auto& game : games)
    for (const auto& opt : enumerate_options(game))
      o.check(opt.mean() == Rational(150) + Rational(1, 2) * opt.invested, "mean identity fails for " + opt.label);
  const auto pg = enumerate_options(ProbabilityGame{})[3];
  const auto rg = enumerate_options(RewardGame{})[3];
  o.check(pg.p == rg.p && pg.win == rg.win && pg.lose == rg.lose, "k=3 and c=90 lotteries differ");

  AgentPopulation pop;
  pop.n = 10000;
  pop.preferences = CaraLogUniform{1e-4, 5e-2};
  pop.seed = 7;
  const auto sim = simulate(games, pop);
  const auto d = dispersion_compare(records_for(sim.records, "probability"), records_for(sim.records, "reward"));
  o.check(d.variance_probability > d.variance_reward, "variance not larger in the probability game");
  o.check(d.corner_mass_probability - d.corner_mass_reward > 0.0, "corner mass difference not positive");
  std::vector<StepChoice> concave;
  for (const auto& c : sim.step_choices)
    if (sim.agents[c.agent_id].pref.is_cara()) concave.push_back(c);
  const auto br = step_branch_shares(concave);
  for (double s : br.node_probability_share) o.check(s >= 0.99, "probability share at a node " + format_double(s));
  const auto again = simulate(games, pop);
  o.check(records_csv(sim.records) == records_csv(again.records), "rerun not byte-identical");
  const double secs = seconds_since(t0);
  o.check(secs < 10.0, "runtime " + format_double(secs) + " s");
  if (o.pass)
    o.detail = "var " + format_double(d.variance_probability) + " > " + format_double(d.variance_reward) +
               ", corner diff " + format_double(d.corner_mass_probability - d.corner_mass_reward) + ", " +
               format_double(secs) + " s";
  return o;
}

// 9. CARA wealth-shift invariance and the risk-neutral limit.
Outcome criterion_9() {
  Outcome o;
  Gen g(1009);
  auto grid_argmax = [](const std::function<double(double)>& f, double hi) {
    std::vector<double> ys;
    for (double x : linspace(0.0, hi, 1001)) ys.push_back(f(x));
    return testsupport::brute_argmax(ys);
  };
  for (int i = 0; i < 100; ++i) {
    const auto m = g.probability_model();
    const auto u = RiskPreference::cara(g.log_uniform(1e-2, 3.0));
    auto shifted = m;
    shifted.B = m.B + g.uniform(0.1, 10.0);
    const auto a = grid_argmax([&](double p) { return prob_eu(m, u, p); }, m.p_bar);
    const auto b = grid_argmax([&](double p) { return prob_eu(shifted, u, p); }, m.p_bar);
    o.check(a == b, "grid argmax moves with wealth, model " + std::to_string(i));
    o.check(solve_probability(m, u).argmax == solve_probability(shifted, u).argmax, "solver choice moves with wealth");
  }
  const auto tiny = RiskPreference::cara(1e-10);
  const auto lin = RiskPreference::linear();
  for (int i = 0; i < 100; ++i) {
    const auto m = g.probability_model();
    o.check(solve_probability(m, tiny).argmax == solve_probability(m, lin).argmax, "probability model differs");
    const auto c = g.credit_model();
    o.check(solve_credit(c, tiny).argmax == solve_credit(c, lin).argmax, "credit model differs");
    const auto r = g.reward_model();
    const double ra = solve_reward(r, tiny).argmax, rb = solve_reward(r, lin).argmax;
    o.check(std::abs(ra - rb) <= 1e-6 * std::max(1.0, rb), "reward model differs");
  }
  Agent t, l;
  t.pref = tiny;
  for (const GameSpec& game : {GameSpec{ProbabilityGame{}}, GameSpec{RewardGame{}}}) {
    const auto opts = enumerate_options(game);
    o.check(best_option(opts, t) == best_option(opts, l), "game choice differs");
  }
  o.check(play_step_game(StepGame{}, t).myopic_path == play_step_game(StepGame{}, l).myopic_path, "step path differs");
  if (o.pass) o.detail = "100 shifted models invariant; lambda = 1e-10 matches linear";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"U-shaped CARA expected utility", criterion_1},
      {"risk-aversion threshold discontinuity", criterion_2},
      {"reward-model concavity and closed form", criterion_3},
      {"second-order dominance of higher probability", criterion_4},
      {"CRRA wealth threshold reproduction", criterion_5},
      {"credit model suite", criterion_6},
      {"calibration pipeline", criterion_7},
      {"experiment simulation", criterion_8},
      {"wealth invariance and risk-neutral limit", criterion_9},
  };
  // Optional arguments select criteria by number; default runs all.
  std::vector<std::size_t> selected;
  for (int a = 1; a < argc; ++a) {
    const auto n = parse_int(argv[a]);
    if (!n || *n < 1 || *n > static_cast<long long>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[a]);
      return 2;
    }
    selected.push_back(static_cast<std::size_t>(*n - 1));
  }
  if (selected.empty())
    for (std::size_t i = 0; i < criteria.size(); ++i) selected.push_back(i);
  int failed = 0;
  for (std::size_t i : selected) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %zu [%s] %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(selected.size()) - failed, selected.size());
  return failed == 0 ? 0 : 1;
}
