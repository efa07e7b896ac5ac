#ifndef RISKINV_UTILITY_HPP
#define RISKINV_UTILITY_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <variant>

#include "riskinv/errors.hpp"

namespace riskinv {

/// Constant absolute risk aversion, u(x) = -exp(-lambda x).
struct Cara {
  double lambda;
};

/// Constant relative risk aversion, u(x) = (x^(1-sigma) - 1) / (1 - sigma),
/// with the logarithm at sigma = 1.
struct Crra {
  double sigma;
};

/// Risk neutrality, u(x) = x.
struct Linear {};

/// A von Neumann-Morgenstern utility from one of the three families above.
///
/// Construct through the named factories; they validate the coefficient.
/// CARA values are available both in the raw form -exp(-lambda x) and in the
/// normalized form (1 - exp(-lambda x)) / lambda, which tends to x as
/// lambda -> 0. Both induce the same ranking of lotteries. For |lambda x|
/// above roughly 700 the exponential saturates to 0 or inf.
class RiskPreference {
 public:
  using Family = std::variant<Cara, Crra, Linear>;

  static RiskPreference cara(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw ArgumentError("CARA coefficient lambda must be > 0, got " + detail::num(lambda));
    return RiskPreference(Cara{lambda});
  }
  static RiskPreference crra(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw ArgumentError("CRRA coefficient sigma must be > 0, got " + detail::num(sigma));
    return RiskPreference(Crra{sigma});
  }
  static RiskPreference linear() { return RiskPreference(Linear{}); }

  const Family& family() const noexcept { return family_; }
  bool is_cara() const noexcept { return std::holds_alternative<Cara>(family_); }
  bool is_crra() const noexcept { return std::holds_alternative<Crra>(family_); }
  bool is_linear() const noexcept { return std::holds_alternative<Linear>(family_); }
  // CARA lambda or CRRA sigma; 0 for Linear.
  double coefficient() const noexcept {
    if (auto* c = std::get_if<Cara>(&family_)) return c->lambda;
    if (auto* c = std::get_if<Crra>(&family_)) return c->sigma;
    return 0.0;
  }

  std::string describe() const {
    if (auto* c = std::get_if<Cara>(&family_)) return "cara(lambda=" + detail::num(c->lambda) + ")";
    if (auto* c = std::get_if<Crra>(&family_)) return "crra(sigma=" + detail::num(c->sigma) + ")";
    return "linear";
  }

 private:
  explicit RiskPreference(Family f) : family_(f) {}
  Family family_;
};

/// Two-outcome lottery over final wealth: w_win with probability p_win,
/// otherwise w_lose. The outcomes need not be ordered.
struct BinaryLottery {
  double p_win;
  double w_win;
  double w_lose;

  BinaryLottery(double p, double win, double lose) : p_win(p), w_win(win), w_lose(lose) {
    if (!(p >= 0.0 && p <= 1.0))
      throw RangeError("lottery probability must lie in [0, 1], got " + detail::num(p));
  }

  double mean() const noexcept { return p_win * w_win + (1.0 - p_win) * w_lose; }
};

namespace detail {

inline void check_crra_domain(double x) {
  if (!(x > 0.0))
    throw DomainError("CRRA utility requires wealth x > 0, got x = " + num(x));
}

}  // namespace detail

/// u(x) in the family's textbook form (raw -exp(-lambda x) for CARA).
inline double eval_utility(const RiskPreference& pref, double x) {
  return std::visit(
      [x](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Cara>) {
          return -std::exp(-f.lambda * x);
        } else if constexpr (std::is_same_v<T, Crra>) {
          detail::check_crra_domain(x);
          if (f.sigma == 1.0) return std::log(x);
          const double k = 1.0 - f.sigma;
          return std::expm1(k * std::log(x)) / k;
        } else {
          return x;
        }
      },
      pref.family());
}

/// Same as eval_utility except CARA uses (1 - exp(-lambda x)) / lambda.
inline double eval_utility_normalized(const RiskPreference& pref, double x) {
  if (auto* c = std::get_if<Cara>(&pref.family())) return -std::expm1(-c->lambda * x) / c->lambda;
  return eval_utility(pref, x);
}

/// u'(x), matching the raw form of eval_utility.
inline double marginal_utility(const RiskPreference& pref, double x) {
  return std::visit(
      [x](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Cara>) {
          return f.lambda * std::exp(-f.lambda * x);
        } else if constexpr (std::is_same_v<T, Crra>) {
          detail::check_crra_domain(x);
          return std::pow(x, -f.sigma);
        } else {
          return 1.0;
        }
      },
      pref.family());
}

/// log u'(x), finite where u'(x) itself would underflow.
inline double log_marginal_utility(const RiskPreference& pref, double x) {
  return std::visit(
      [x](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Cara>) {
          return std::log(f.lambda) - f.lambda * x;
        } else if constexpr (std::is_same_v<T, Crra>) {
          detail::check_crra_domain(x);
          return -f.sigma * std::log(x);
        } else {
          return 0.0;
        }
      },
      pref.family());
}

namespace detail {

template <class U>
double expectation(const BinaryLottery& lot, U&& u) {
  // Zero-probability outcomes are skipped so a degenerate lottery never
  // evaluates u outside its domain.
  if (lot.p_win == 1.0) return u(lot.w_win);
  if (lot.p_win == 0.0) return u(lot.w_lose);
  return lot.p_win * u(lot.w_win) + (1.0 - lot.p_win) * u(lot.w_lose);
}

}  // namespace detail

inline double expected_utility(const RiskPreference& pref, const BinaryLottery& lot) {
  return detail::expectation(lot, [&](double x) { return eval_utility(pref, x); });
}

inline double expected_utility_normalized(const RiskPreference& pref, const BinaryLottery& lot) {
  return detail::expectation(lot, [&](double x) { return eval_utility_normalized(pref, x); });
}

/// Expected utility shifted by a constant so that comparisons keep full
/// relative precision: CRRA drops the -1/(1 - sigma) term, which otherwise
/// swamps x^(1 - sigma) at large wealth when sigma > 1. Same ordering as
/// expected_utility_normalized.
inline double expected_utility_ordinal(const RiskPreference& pref, const BinaryLottery& lot) {
  if (auto* c = std::get_if<Crra>(&pref.family()); c && c->sigma != 1.0) {
    const double k = 1.0 - c->sigma;
    return detail::expectation(lot, [&](double x) {
      detail::check_crra_domain(x);
      return std::pow(x, k) / k;
    });
  }
  return expected_utility_normalized(pref, lot);
}

/// Wealth x* with u(x*) equal to the lottery's expected utility, in closed form.
inline double certainty_equivalent(const RiskPreference& pref, const BinaryLottery& lot) {
  if (lot.p_win == 1.0 || lot.p_win == 0.0) {
    const double w = lot.p_win == 1.0 ? lot.w_win : lot.w_lose;
    if (pref.is_crra()) detail::check_crra_domain(w);
    return w;
  }
  const double p = lot.p_win;
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Cara>) {
          // Factor out the smaller outcome to keep the exponentials bounded.
          const double m = std::min(lot.w_win, lot.w_lose);
          const double s = p * std::exp(-f.lambda * (lot.w_win - m)) +
                           (1.0 - p) * std::exp(-f.lambda * (lot.w_lose - m));
          return m - std::log(s) / f.lambda;
        } else if constexpr (std::is_same_v<T, Crra>) {
          detail::check_crra_domain(lot.w_win);
          detail::check_crra_domain(lot.w_lose);
          if (f.sigma == 1.0)
            return std::exp(p * std::log(lot.w_win) + (1.0 - p) * std::log(lot.w_lose));
          const double k = 1.0 - f.sigma;
          const double s = p * std::pow(lot.w_win, k) + (1.0 - p) * std::pow(lot.w_lose, k);
          return std::pow(s, 1.0 / k);
        } else {
          return lot.mean();
        }
      },
      pref.family());
}

/// Sign of [u(certain) - EU(lottery)] for CARA, computed without overflow as
/// p*expm1(lambda(c - w)) + (1-p)*expm1(lambda(c - l)). Positive means the
/// certain amount is strictly preferred.
inline double cara_safe_advantage(double lambda, const BinaryLottery& lot, double certain) {
  return lot.p_win * std::expm1(lambda * (certain - lot.w_win)) +
         (1.0 - lot.p_win) * std::expm1(lambda * (certain - lot.w_lose));
}

/// Whether the lottery is weakly preferred to a sure amount. Ties go to the
/// lottery. CARA uses cara_safe_advantage so that large lambda * wealth
/// cannot flatten the comparison.
inline bool prefers_lottery(const RiskPreference& pref, const BinaryLottery& lot, double certain) {
  if (auto* c = std::get_if<Cara>(&pref.family())) return !(cara_safe_advantage(c->lambda, lot, certain) > 0.0);
  if (pref.is_linear()) return lot.mean() >= certain;
  return expected_utility(pref, lot) >= eval_utility(pref, certain);
}

}  // namespace riskinv

#endif  // RISKINV_UTILITY_HPP
