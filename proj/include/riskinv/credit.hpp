#ifndef RISKINV_CREDIT_HPP
#define RISKINV_CREDIT_HPP

#include <algorithm>
#include <cmath>
#include <compare>

#include "riskinv/errors.hpp"
#include "riskinv/models.hpp"
#include "riskinv/solver.hpp"
#include "riskinv/utility.hpp"

namespace riskinv {

/// Probability investment financed in a competitive credit market.
///
/// The agent's wealth B is not verifiable, so a borrower repays at most the
/// project's own return: at most L on failure, at most H on success. Lenders
/// break even in expectation and never lend more than alpha * p.
struct CreditModel {
  double B = 0.0;
  double H = 0.0;
  double L = 0.0;
  double alpha = 0.0;
  double p_bar = 0.0;

  void validate() const {
    detail::require(std::isfinite(B) && B >= 0.0, "CreditModel: B must be >= 0");
    detail::require(std::isfinite(H) && L > 0.0 && L < H, "CreditModel: need 0 < L < H");
    detail::require(alpha > 0.0 && alpha < H - L, "CreditModel: need 0 < alpha < H - L");
    detail::require(p_bar > 0.0 && p_bar < 1.0, "CreditModel: need 0 < p_bar < 1");
  }

  // p at which the loan alpha * p reaches L.
  double kink() const noexcept { return L / alpha; }

  ProbabilityModel as_probability_model() const { return {B, H, L, alpha, p_bar}; }
};

struct RepaymentSchedule {
  double loan = 0.0;
  double repay_fail = 0.0;
  double repay_success = 0.0;
};

/// Zero-profit repayments for a loan backed only by a project that returns L
/// on failure and succeeds with probability p.
inline RepaymentSchedule break_even_repayment(double loan, double L, double p) {
  detail::require(loan >= 0.0, "loan must be >= 0");
  if (loan == 0.0) return {};
  if (!(p > 0.0 && p <= 1.0))
    throw ArgumentError("repayment schedule undefined for a positive loan at p = " + detail::num(p));
  const double fail = std::min(loan, L);
  return {loan, fail, (loan - (1.0 - p) * fail) / p};
}

inline RepaymentSchedule break_even_schedule(const CreditModel& m, double p) {
  if (!(p >= 0.0 && p <= m.p_bar))
    throw RangeError("p = " + detail::num(p) + " outside [0, p_bar = " + detail::num(m.p_bar) + "]");
  return break_even_repayment(m.alpha * p, m.L, p);
}

enum class CreditBranch { SmallLoan, LargeLoan };

/// Final-wealth lottery of a fully loan-financed investment, evaluated on a
/// chosen branch of the piecewise expected utility:
///   small loan (alpha p <  L): B + H - alpha p  /  B + L - alpha p
///   large loan (alpha p >= L): B + H - L - alpha + L / p  /  B
inline BinaryLottery credit_branch_lottery(const CreditModel& m, double p, CreditBranch branch) {
  if (branch == CreditBranch::SmallLoan) return {p, m.B + m.H - m.alpha * p, m.B + m.L - m.alpha * p};
  if (!(p > 0.0)) throw RangeError("large-loan branch needs p > 0");
  return {p, m.B + m.H - m.L - m.alpha + m.L / p, m.B};
}

inline CreditBranch credit_branch_at(const CreditModel& m, double p) {
  return m.alpha * p < m.L ? CreditBranch::SmallLoan : CreditBranch::LargeLoan;
}

inline BinaryLottery credit_lottery(const CreditModel& m, double p) {
  if (!(p >= 0.0 && p <= m.p_bar))
    throw RangeError("p = " + detail::num(p) + " outside [0, p_bar = " + detail::num(m.p_bar) + "]");
  return credit_branch_lottery(m, p, credit_branch_at(m, p));
}

inline double credit_eu(const CreditModel& m, const RiskPreference& pref, double p) {
  return expected_utility(pref, credit_lottery(m, p));
}

inline double credit_eu_normalized(const CreditModel& m, const RiskPreference& pref, double p) {
  return expected_utility_normalized(pref, credit_lottery(m, p));
}

/// dU/dp on the large-loan branch:
///   -p u'(W) L / p^2 + u(W) - u(B),  W = B + H - L - alpha + L / p.
inline double credit_large_loan_slope(const CreditModel& m, const RiskPreference& pref, double p) {
  if (!(p > 0.0)) throw RangeError("large-loan slope needs p > 0");
  const double w = m.B + m.H - m.L - m.alpha + m.L / p;
  return -p * marginal_utility(pref, w) * m.L / (p * p) + eval_utility(pref, w) - eval_utility(pref, m.B);
}

struct FinancingComparison {
  double eu_full_loan;
  double eu_mixed;
  double mean_full_loan;
  double mean_mixed;
  // eu_full_loan <=> eu_mixed, |difference| <= tie_tolerance reported as equivalent.
  std::partial_ordering order;

  bool full_loan_weakly_preferred() const { return order >= 0; }
};

/// Lottery when the agent pays own_funds up front and borrows the rest of
/// alpha * p at its own break-even schedule.
inline BinaryLottery mixed_financing_lottery(const CreditModel& m, double p, double own_funds) {
  const double cost = m.alpha * p;
  if (!(own_funds >= 0.0 && own_funds <= std::min(m.B, cost)))
    throw ArgumentError("own funds " + detail::num(own_funds) + " outside [0, min(B, alpha p) = " +
                        detail::num(std::min(m.B, cost)) + "]");
  const RepaymentSchedule s = break_even_repayment(cost - own_funds, m.L, p);
  const double base = m.B - own_funds;
  return {p, base + m.H - s.repay_success, base + m.L - s.repay_fail};
}

/// Compares full loan financing of alpha * p with partial self-financing at
/// the same p.
inline FinancingComparison full_loan_dominates(const CreditModel& m, const RiskPreference& pref,
                                               double p, double own_funds,
                                               double tie_tolerance = 0.0) {
  m.validate();
  const BinaryLottery mixed = mixed_financing_lottery(m, p, own_funds);
  const BinaryLottery full = credit_lottery(m, p);
  const double a = expected_utility(pref, full);
  const double b = expected_utility(pref, mixed);
  const std::partial_ordering ord =
      std::abs(a - b) <= tie_tolerance ? std::partial_ordering::equivalent : a <=> b;
  return {a, b, full.mean(), mixed.mean(), ord};
}

/// Optimal p under full loan financing. CARA and Linear agents compare the
/// corners only; CRRA agents get the grid-and-refine search.
inline SolveReport solve_credit(const CreditModel& model, const RiskPreference& pref,
                                const SolverOptions& opts = {}) {
  model.validate();
  if (pref.is_crra() && !(model.B > crra_domain_margin(model.B)))
    throw InfeasibleError("CRRA credit model needs B > 0: a failed large loan leaves wealth B");
  auto f = [&](double p) { return expected_utility_ordinal(pref, credit_lottery(model, p)); };
  SolveReport rep;
  rep.feasible_max = model.p_bar;

  std::vector<double> ys(std::max<std::size_t>(opts.grid_size, 3));
  if (!pref.is_crra()) {
    rep.argmax = prefers_lottery(pref, credit_lottery(model, model.p_bar), model.B + model.L) ? model.p_bar : 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i)
      ys[i] = f(i + 1 == ys.size() ? model.p_bar
                                   : model.p_bar * static_cast<double>(i) / static_cast<double>(ys.size() - 1));
    rep.shape = detail::classify_differences(ys).shape;
    rep.diagnostics = {ys.size(), 0, 0.0};
  } else {
    auto r = maximize_on_interval(f, 0.0, model.p_bar, opts);
    rep.argmax = r.argmax;
    rep.shape = r.shape.shape;
    rep.diagnostics = {opts.grid_size, r.refinement_iterations, opts.golden_rel_tol * model.p_bar};
  }
  rep.max_eu = credit_eu(model, pref, rep.argmax);
  return rep;
}

/// Risk-aversion threshold with credit: below it CARA agents borrow for
/// p_bar, above it they choose p = 0.
inline ThresholdReport credit_lambda_threshold(const CreditModel& model,
                                               const LambdaThresholdOptions& opts = {}) {
  model.validate();
  const BinaryLottery risky = credit_lottery(model, model.p_bar);
  const double safe = model.B + model.L;
  auto prefers_safe = [&](double lambda) { return cara_safe_advantage(lambda, risky, safe) > 0.0; };
  return detail::lambda_switch(prefers_safe, model.p_bar, 0.0, opts);
}

/// Wealth-dependent risk aversion lambda(B) = k / B.
struct InverseWealthAversion {
  double k = 1.0;
  double operator()(double B) const { return k / B; }
};

/// Income threshold when poorer agents are more risk averse: below it the
/// agent chooses p = 0, above it p_bar. B = 0 is treated as infinitely risk
/// averse, so it never invests.
inline ThresholdReport credit_wealth_threshold(const CreditModel& model, InverseWealthAversion aversion,
                                               const WealthThresholdOptions& opts = {}) {
  detail::require(aversion.k > 0.0, "lambda(B) = k / B needs k > 0");
  auto choice_at = [&](double B) {
    if (!(B > 0.0)) return 0.0;
    CreditModel m = model;
    m.B = B;
    return solve_credit(m, RiskPreference::cara(aversion(B)), opts.solver).argmax;
  };
  return detail::wealth_switch(choice_at, opts);
}

}  // namespace riskinv

#endif  // RISKINV_CREDIT_HPP
