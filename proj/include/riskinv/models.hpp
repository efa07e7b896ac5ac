#ifndef RISKINV_MODELS_HPP
#define RISKINV_MODELS_HPP

#include <algorithm>
#include <cmath>
#include <compare>
#include <variant>

#include "riskinv/errors.hpp"
#include "riskinv/utility.hpp"

namespace riskinv {

/// Investment buys success probability p in [0, p_bar] at cost alpha * p.
/// Final wealth is B + H - alpha p on success and B + L - alpha p on failure.
struct ProbabilityModel {
  double B = 0.0;
  double H = 0.0;
  double L = 0.0;
  double alpha = 0.0;
  double p_bar = 0.0;

  void validate() const {
    detail::require(std::isfinite(B) && B >= 0.0, "ProbabilityModel: B must be >= 0");
    detail::require(std::isfinite(H) && std::isfinite(L) && L < H,
                    "ProbabilityModel: need L < H");
    detail::require(alpha > 0.0 && alpha < H - L,
                    "ProbabilityModel: need 0 < alpha < H - L (positive expected return)");
    detail::require(p_bar > 0.0 && p_bar < 1.0, "ProbabilityModel: need 0 < p_bar < 1");
  }

  BinaryLottery lottery(double p) const { return {p, B + H - alpha * p, B + L - alpha * p}; }
};

/// Relative slack kept between CRRA consumption and zero.
inline double crra_domain_margin(double B) { return 1e-9 * std::max(1.0, B); }

/// Upper end of the usable p-range: p_bar, reduced under CRRA so that failure
/// wealth B + L - alpha p stays at least crra_domain_margin(B).
/// Throws InfeasibleError when no p >= 0 qualifies.
inline double feasible_p_max(const ProbabilityModel& m, const RiskPreference& pref) {
  if (!pref.is_crra()) return m.p_bar;
  const double slack = m.B + m.L - crra_domain_margin(m.B);
  if (slack < 0.0)
    throw InfeasibleError("no feasible investment under CRRA: B + L = " + detail::num(m.B + m.L) +
                          " leaves no positive consumption");
  return std::min(m.p_bar, slack / m.alpha);
}

namespace detail {

inline void check_p(const ProbabilityModel& m, double p) {
  if (!(p >= 0.0 && p <= m.p_bar))
    throw RangeError("p = " + num(p) + " outside [0, p_bar = " + num(m.p_bar) + "]");
}

}  // namespace detail

inline double prob_eu(const ProbabilityModel& m, const RiskPreference& pref, double p) {
  detail::check_p(m, p);
  return expected_utility(pref, m.lottery(p));
}

inline double prob_eu_normalized(const ProbabilityModel& m, const RiskPreference& pref, double p) {
  detail::check_p(m, p);
  return expected_utility_normalized(pref, m.lottery(p));
}

struct CaraDerivatives {
  double first;
  double second;
};

/// Closed-form U'(p) and U''(p) of the raw CARA expected utility
///   U(p) = -p exp(-lambda(H' - alpha p)) - (1-p) exp(-lambda(L' - alpha p))
/// with H' = B + H, L' = B + L. Divide by lambda for the normalized scale.
inline CaraDerivatives prob_eu_cara_derivatives(const ProbabilityModel& m, double lambda, double p) {
  const double hi = m.B + m.H;
  const double lo = m.B + m.L;
  const double growth = std::exp(lambda * m.alpha * p);
  const double e_lo = std::exp(-lambda * lo);
  // e^{-lambda L'} - e^{-lambda H'} without cancellation.
  const double spread = -e_lo * std::expm1(-lambda * (hi - lo));
  const double first = (1.0 + lambda * m.alpha * p) * growth * spread - lambda * m.alpha * growth * e_lo;
  const double second = lambda * m.alpha * (first + growth * spread);
  return {first, second};
}

struct AffineReward {
  double h0;
  double m;
};

struct PowerReward {
  double h0;
  double m;
  double theta;
};

/// Success payoff H(c) as a function of the amount invested.
struct RewardFunction {
  std::variant<AffineReward, PowerReward> shape;
  double c_max = 0.0;

  static RewardFunction affine(double h0, double m, double c_max) {
    return {AffineReward{h0, m}, c_max};
  }
  static RewardFunction power(double h0, double m, double theta, double c_max) {
    return {PowerReward{h0, m, theta}, c_max};
  }

  void validate() const {
    detail::require(std::isfinite(c_max) && c_max > 0.0, "RewardFunction: c_max must be > 0");
    if (auto* a = std::get_if<AffineReward>(&shape)) {
      detail::require(std::isfinite(a->h0) && a->m > 0.0, "RewardFunction: affine slope m must be > 0");
    } else {
      const auto& pw = std::get<PowerReward>(shape);
      detail::require(std::isfinite(pw.h0) && pw.m > 0.0, "RewardFunction: power scale m must be > 0");
      detail::require(pw.theta > 0.0 && pw.theta <= 1.0,
                      "RewardFunction: power exponent theta must lie in (0, 1]");
    }
  }

  double h0() const {
    return std::visit([](const auto& s) { return s.h0; }, shape);
  }

  double value(double c) const {
    if (auto* a = std::get_if<AffineReward>(&shape)) return a->h0 + a->m * c;
    const auto& pw = std::get<PowerReward>(shape);
    return pw.h0 + pw.m * std::pow(c, pw.theta);
  }

  double slope(double c) const {
    if (auto* a = std::get_if<AffineReward>(&shape)) return a->m;
    const auto& pw = std::get<PowerReward>(shape);
    return pw.m * pw.theta * std::pow(c, pw.theta - 1.0);
  }

  double curvature(double c) const {
    if (std::holds_alternative<AffineReward>(shape)) return 0.0;
    const auto& pw = std::get<PowerReward>(shape);
    return pw.m * pw.theta * (pw.theta - 1.0) * std::pow(c, pw.theta - 2.0);
  }
};

/// Investment c in [0, c_max] buys the success payoff H(c) at a fixed
/// success probability p. Wealth is B + H(c) - c on success, B + L - c on failure.
struct RewardModel {
  double B = 0.0;
  double L = 0.0;
  double p = 0.5;
  RewardFunction reward;

  void validate() const {
    detail::require(std::isfinite(B) && B >= 0.0, "RewardModel: B must be >= 0");
    detail::require(p > 0.0 && p < 1.0, "RewardModel: need 0 < p < 1");
    reward.validate();
    detail::require(reward.h0() >= L, "RewardModel: need H(0) >= L");
  }

  BinaryLottery lottery(double c) const { return {p, B + reward.value(c) - c, B + L - c}; }
};

/// Largest usable investment: c_max, reduced under CRRA to keep B + L - c positive.
inline double feasible_c_max(const RewardModel& m, const RiskPreference& pref) {
  if (!pref.is_crra()) return m.reward.c_max;
  const double slack = m.B + m.L - crra_domain_margin(m.B);
  if (slack < 0.0)
    throw InfeasibleError("no feasible investment under CRRA: B + L = " + detail::num(m.B + m.L));
  return std::min(m.reward.c_max, slack);
}

inline double reward_eu(const RewardModel& m, const RiskPreference& pref, double c) {
  if (!(c >= 0.0 && c <= m.reward.c_max))
    throw RangeError("c = " + detail::num(c) + " outside [0, c_max = " + detail::num(m.reward.c_max) + "]");
  return expected_utility(pref, m.lottery(c));
}

inline double reward_eu_normalized(const RewardModel& m, const RiskPreference& pref, double c) {
  if (!(c >= 0.0 && c <= m.reward.c_max))
    throw RangeError("c = " + detail::num(c) + " outside [0, c_max = " + detail::num(m.reward.c_max) + "]");
  return expected_utility_normalized(pref, m.lottery(c));
}

/// Project with constant expected return C: choosing success probability p
/// fixes the success payoff at H(p) = (C - (1-p) L) / p.
struct HybridProject {
  double C = 0.0;
  double L = 0.0;
  double p0 = 0.0;
  double p_bar = 1.0;

  void validate() const {
    detail::require(std::isfinite(C) && std::isfinite(L) && C > L, "HybridProject: need C > L");
    detail::require(p0 > 0.0 && p0 <= p_bar && p_bar <= 1.0,
                    "HybridProject: need 0 < p0 <= p_bar <= 1");
  }
};

inline double hybrid_reward(const HybridProject& proj, double p) {
  if (!(p >= proj.p0 && p <= proj.p_bar))
    throw RangeError("p = " + detail::num(p) + " outside [p0 = " + detail::num(proj.p0) +
                     ", p_bar = " + detail::num(proj.p_bar) + "]");
  return (proj.C - (1.0 - p) * proj.L) / p;
}

inline BinaryLottery hybrid_lottery(const HybridProject& proj, double p) {
  return {p, hybrid_reward(proj, p), proj.L};
}

struct SosdComparison {
  double eu_high_p;  // the higher-probability, lower-reward lottery
  double eu_low_p;
  // eu_high_p <=> eu_low_p, with |difference| <= tie_tolerance reported as equivalent.
  std::partial_ordering order;

  double difference() const noexcept { return eu_high_p - eu_low_p; }
};

/// Compares the p-lottery against the p'-lottery of the same project (p > p').
inline SosdComparison sosd_prefer_probability(const HybridProject& proj, const RiskPreference& pref,
                                              double p, double p_prime,
                                              double tie_tolerance = 0.0) {
  if (!(p > p_prime))
    throw ArgumentError("sosd comparison needs p > p', got p = " + detail::num(p) +
                        ", p' = " + detail::num(p_prime));
  const double hi = expected_utility(pref, hybrid_lottery(proj, p));
  const double lo = expected_utility(pref, hybrid_lottery(proj, p_prime));
  std::partial_ordering ord = std::abs(hi - lo) <= tie_tolerance ? std::partial_ordering::equivalent
                                                                  : hi <=> lo;
  return {hi, lo, ord};
}

}  // namespace riskinv

#endif  // RISKINV_MODELS_HPP
