#ifndef RISKINV_SOLVER_HPP
#define RISKINV_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "riskinv/errors.hpp"
#include "riskinv/models.hpp"
#include "riskinv/search.hpp"
#include "riskinv/utility.hpp"

namespace riskinv {

enum class Shape { U_SHAPED, MONOTONE_UP, MONOTONE_DOWN, CONCAVE, IRREGULAR };

inline std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::U_SHAPED: return "U_SHAPED";
    case Shape::MONOTONE_UP: return "MONOTONE_UP";
    case Shape::MONOTONE_DOWN: return "MONOTONE_DOWN";
    case Shape::CONCAVE: return "CONCAVE";
    case Shape::IRREGULAR: return "IRREGULAR";
  }
  return "IRREGULAR";
}

struct SolveDiagnostics {
  std::size_t grid_size = 0;
  std::size_t refinement_iterations = 0;
  double residual_tolerance = 0.0;
};

struct SolveReport {
  double argmax = 0.0;
  double max_eu = 0.0;  // raw utility scale (-exp(-lambda x) for CARA)
  Shape shape = Shape::IRREGULAR;
  double feasible_max = 0.0;  // upper end of the searched interval
  SolveDiagnostics diagnostics;
};

struct ThresholdReport {
  double threshold = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double side_low = 0.0;   // chosen investment at lo
  double side_high = 0.0;  // chosen investment at hi
  std::size_t iterations = 0;
};

struct SolverOptions {
  std::size_t grid_size = 2001;
  double golden_rel_tol = 1e-12;
  double concavity_rel_tol = 1e-9;
};

struct ShapeDiagnostic {
  Shape shape = Shape::MONOTONE_UP;
  std::size_t sign_changes = 0;
  std::string pattern;  // run-length-collapsed signs, e.g. "-+"
};

namespace detail {

inline ShapeDiagnostic classify_differences(std::span<const double> ys) {
  double scale = 0.0;
  for (double y : ys) scale = std::max(scale, std::abs(y));
  const double dead_band = 1e-12 * scale;
  ShapeDiagnostic out;
  for (std::size_t i = 1; i < ys.size(); ++i) {
    const double d = ys[i] - ys[i - 1];
    if (std::abs(d) <= dead_band) continue;
    const char s = d > 0 ? '+' : '-';
    if (out.pattern.empty() || out.pattern.back() != s) out.pattern.push_back(s);
  }
  out.sign_changes = out.pattern.empty() ? 0 : out.pattern.size() - 1;
  if (out.pattern.empty() || out.pattern == "+")
    out.shape = Shape::MONOTONE_UP;
  else if (out.pattern == "-")
    out.shape = Shape::MONOTONE_DOWN;
  else if (out.pattern == "-+")
    out.shape = Shape::U_SHAPED;
  else if (out.pattern == "+-")
    out.shape = Shape::CONCAVE;
  else
    out.shape = Shape::IRREGULAR;
  return out;
}

}  // namespace detail

/// Classifies sampled (x, f(x)) pairs by the signs of forward differences.
/// Differences within 1e-12 of the largest |f| are ignored. A flat sequence
/// counts as MONOTONE_UP.
inline ShapeDiagnostic ushape_diagnostic(std::span<const std::pair<double, double>> samples) {
  if (samples.size() < 3) throw ArgumentError("ushape_diagnostic needs at least 3 samples");
  std::vector<double> ys;
  ys.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i > 0 && !(samples[i].first > samples[i - 1].first))
      throw ArgumentError("ushape_diagnostic: samples must be strictly increasing in x (index " +
                          std::to_string(i) + ")");
    ys.push_back(samples[i].second);
  }
  return detail::classify_differences(ys);
}

struct IntervalMax {
  double argmax = 0.0;
  double value = 0.0;
  ShapeDiagnostic shape;
  std::size_t refinement_iterations = 0;
};

/// Grid scan of f on [lo, hi], then golden-section refinement around every
/// local grid maximum. Endpoints are always candidates; exact ties go to the
/// larger x.
template <class F>
IntervalMax maximize_on_interval(F&& f, double lo, double hi, const SolverOptions& opts) {
  IntervalMax out;
  if (!(hi > lo)) {
    out.argmax = lo;
    out.value = f(lo);
    return out;
  }
  const std::size_t n = std::max<std::size_t>(opts.grid_size, 3);
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    ys[i] = f(xs[i]);
  }
  out.shape = detail::classify_differences(ys);

  auto consider = [&](double x, double v) {
    if (v > out.value || (v == out.value && x > out.argmax)) {
      out.argmax = x;
      out.value = v;
    }
  };
  out.argmax = xs[0];
  out.value = ys[0];
  for (std::size_t i = 1; i < n; ++i) consider(xs[i], ys[i]);

  const double tol = opts.golden_rel_tol * (hi - lo);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const bool local_max = ys[i] >= ys[i - 1] && ys[i] >= ys[i + 1] && (ys[i] > ys[i - 1] || ys[i] > ys[i + 1]);
    if (!local_max) continue;
    auto r = golden_section_maximize(f, xs[i - 1], xs[i + 1], tol);
    out.refinement_iterations += r.iterations;
    consider(r.x, r.fx);
  }
  return out;
}

/// Optimal success probability in the probability model.
///
/// CARA and Linear agents have U-shaped (or monotone) expected utility on
/// [0, p_bar], so only the two corners are compared. CRRA agents may have an
/// interior optimum, so the full range is scanned and refined.
inline SolveReport solve_probability(const ProbabilityModel& model, const RiskPreference& pref,
                                     const SolverOptions& opts = {}) {
  model.validate();
  SolveReport rep;
  if (!pref.is_crra()) {
    rep.argmax = prefers_lottery(pref, model.lottery(model.p_bar), model.B + model.L) ? model.p_bar : 0.0;
    rep.feasible_max = model.p_bar;
    if (pref.is_linear()) {
      rep.shape = Shape::MONOTONE_UP;
    } else {
      const double lambda = pref.coefficient();
      const double d0 = prob_eu_cara_derivatives(model, lambda, 0.0).first;
      const double d1 = prob_eu_cara_derivatives(model, lambda, model.p_bar).first;
      rep.shape = d0 >= 0.0 ? Shape::MONOTONE_UP : (d1 <= 0.0 ? Shape::MONOTONE_DOWN : Shape::U_SHAPED);
    }
    rep.diagnostics = {2, 0, 0.0};
  } else {
    const double p_max = feasible_p_max(model, pref);
    auto f = [&](double p) {
      detail::check_p(model, p);
      return expected_utility_ordinal(pref, model.lottery(p));
    };
    auto r = maximize_on_interval(f, 0.0, p_max, opts);
    rep.argmax = r.argmax;
    rep.feasible_max = p_max;
    // A decreasing-increasing stretch followed by an interior peak near the
    // consumption bound is the expected CRRA pattern.
    rep.shape = r.shape.pattern == "-+-" ? Shape::U_SHAPED : r.shape.shape;
    rep.diagnostics = {opts.grid_size, r.refinement_iterations, opts.golden_rel_tol * p_max};
  }
  rep.max_eu = prob_eu(model, pref, rep.argmax);
  return rep;
}

/// Optimal investment in the reward model. Expected utility is concave in c,
/// so the first-order condition is bisected directly; a grid of second
/// differences confirms concavity.
///
/// The condition p (H'(c) - 1) u'(w_win) = (1 - p) u'(w_lose) is compared in
/// logs, which stays accurate where utility levels are numerically flat.
inline SolveReport solve_reward(const RewardModel& model, const RiskPreference& pref,
                                const SolverOptions& opts = {}) {
  model.validate();
  const double c_hi = feasible_c_max(model, pref);
  auto f = [&](double c) { return reward_eu_normalized(model, pref, c); };
  auto gain = [&](double c) {
    const BinaryLottery lot = model.lottery(c);
    const double net = model.reward.slope(c) - 1.0;
    const double up = net > 0.0 ? std::log(model.p) + std::log(net) + log_marginal_utility(pref, lot.w_win)
                                : -INFINITY;
    return up - (std::log1p(-model.p) + log_marginal_utility(pref, lot.w_lose));
  };

  SolveReport rep;
  rep.feasible_max = c_hi;
  std::size_t iterations = 0;
  double width = 0.0;
  if (!(gain(0.0) > 0.0)) {
    rep.argmax = 0.0;
  } else if (gain(c_hi) >= 0.0) {
    rep.argmax = c_hi;
  } else {
    double lo = 0.0, hi = c_hi;
    while (true) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (gain(mid) > 0.0 ? lo : hi) = mid;
      ++iterations;
    }
    rep.argmax = 0.5 * (lo + hi);
    width = hi - lo;
  }

  const std::size_t n = std::max<std::size_t>(opts.grid_size, 3);
  std::vector<double> ys(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ys[i] = f(i + 1 == n ? c_hi : c_hi * static_cast<double>(i) / static_cast<double>(n - 1));
    scale = std::max(scale, std::abs(ys[i]));
  }
  bool concave = true;
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (ys[i + 1] - 2.0 * ys[i] + ys[i - 1] > opts.concavity_rel_tol * scale) concave = false;
  rep.shape = concave ? Shape::CONCAVE : Shape::IRREGULAR;
  rep.diagnostics = {n, iterations, width};
  rep.max_eu = reward_eu(model, pref, rep.argmax);
  return rep;
}

struct LambdaThresholdOptions {
  double rel_tol = 1e-9;
  double lambda_min = 1e-12;
  double lambda_max = 1e6;
};

namespace detail {

/// Bracket and bisect the risk-aversion level at which a CARA agent switches
/// from the risky corner to the safe corner. prefers_safe must be monotone:
/// false for small lambda, true for large lambda.
template <class PrefersSafe>
ThresholdReport lambda_switch(PrefersSafe&& prefers_safe, double risky_choice, double safe_choice,
                              const LambdaThresholdOptions& opts) {
  double lo = 1.0, hi = 1.0;
  if (prefers_safe(1.0)) {
    while (prefers_safe(lo)) {
      lo *= 0.5;
      if (lo < opts.lambda_min)
        throw NoThresholdError("safe corner preferred for every lambda down to " + num(opts.lambda_min),
                               safe_choice);
    }
    hi = 2.0 * lo;
  } else {
    while (!prefers_safe(hi)) {
      hi *= 2.0;
      if (hi > opts.lambda_max)
        throw NoThresholdError("risky corner preferred for every lambda up to " + num(opts.lambda_max),
                               risky_choice);
    }
    lo = 0.5 * hi;
  }
  auto b = bisect_switch(prefers_safe, lo, hi,
                         [&](double a, double z) { return z - a <= opts.rel_tol * z; });
  return {0.5 * (b.lo + b.hi), b.lo, b.hi, risky_choice, safe_choice, b.iterations};
}

}  // namespace detail

/// Risk-aversion threshold of the probability model: CARA agents with lambda
/// below it choose p_bar, above it choose 0.
inline ThresholdReport lambda_threshold(const ProbabilityModel& model,
                                        const LambdaThresholdOptions& opts = {}) {
  model.validate();
  const BinaryLottery risky = model.lottery(model.p_bar);
  const double safe = model.B + model.L;
  auto prefers_safe = [&](double lambda) { return cara_safe_advantage(lambda, risky, safe) > 0.0; };
  return detail::lambda_switch(prefers_safe, model.p_bar, 0.0, opts);
}

struct WealthThresholdOptions {
  double abs_tol = 1e-4;
  double B_lo = 0.0;
  double B_hi_start = 1.0;
  double B_hi_limit = 1e6;
  SolverOptions solver;
};

namespace detail {

template <class Choice>
ThresholdReport wealth_switch(Choice&& choice_at, const WealthThresholdOptions& opts) {
  auto invests = [&](double B) { return choice_at(B) > 0.0; };
  const double lo_choice = choice_at(opts.B_lo);
  if (lo_choice > 0.0)
    throw NoThresholdError("agent already invests at B = " + num(opts.B_lo), lo_choice);
  double lo = opts.B_lo;
  double hi = std::max(opts.B_hi_start, opts.B_lo + opts.abs_tol);
  while (!invests(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > opts.B_hi_limit)
      throw NoThresholdError("agent never invests for B up to " + num(opts.B_hi_limit), 0.0);
  }
  auto b = bisect_switch(invests, lo, hi, [&](double a, double z) { return z - a <= opts.abs_tol; });
  return {0.5 * (b.lo + b.hi), b.lo, b.hi, choice_at(b.lo), choice_at(b.hi), b.iterations};
}

}  // namespace detail

/// Initial-wealth threshold: the smallest B (within abs_tol) at which the
/// agent's optimal p becomes positive. The model's own B is ignored.
/// Infeasible wealth levels count as not investing.
inline ThresholdReport wealth_threshold(const ProbabilityModel& model, const RiskPreference& pref,
                                        const WealthThresholdOptions& opts = {}) {
  auto choice_at = [&](double B) {
    ProbabilityModel m = model;
    m.B = B;
    try {
      return solve_probability(m, pref, opts.solver).argmax;
    } catch (const InfeasibleError&) {
      return 0.0;
    }
  };
  return detail::wealth_switch(choice_at, opts);
}

}  // namespace riskinv

#endif  // RISKINV_SOLVER_HPP
