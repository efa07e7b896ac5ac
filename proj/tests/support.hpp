#ifndef RISKINV_TESTS_SUPPORT_HPP
#define RISKINV_TESTS_SUPPORT_HPP

// Hand-rolled generators and independent oracles shared by the test suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "riskinv/credit.hpp"
#include "riskinv/models.hpp"
#include "riskinv/utility.hpp"

namespace testsupport {

using namespace riskinv;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53);
  }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool coin() { return (rng_() & 1u) != 0; }

  // Valid probability model; H - L spans two orders of magnitude.
  ProbabilityModel probability_model() {
    ProbabilityModel m;
    m.B = uniform(0.0, 5.0);
    m.L = uniform(-1.0, 1.0);
    m.H = m.L + log_uniform(0.2, 20.0);
    m.alpha = (m.H - m.L) * uniform(0.05, 0.95);
    m.p_bar = uniform(0.1, 0.99);
    return m;
  }

  CreditModel credit_model() {
    CreditModel m;
    m.B = uniform(0.2, 5.0);
    m.L = uniform(0.1, 2.0);
    m.H = m.L + log_uniform(0.5, 10.0);
    m.alpha = (m.H - m.L) * uniform(0.05, 0.95);
    m.p_bar = uniform(0.1, 0.99);
    return m;
  }

  RewardModel reward_model() {
    RewardModel m;
    m.B = uniform(1.0, 200.0);
    m.L = 0.0;
    m.p = uniform(0.1, 0.9);
    const double c_max = uniform(10.0, 150.0);
    if (coin())
      m.reward = RewardFunction::affine(uniform(0.0, 20.0), uniform(1.05, 5.0), c_max);
    else
      m.reward = RewardFunction::power(uniform(0.0, 20.0), uniform(1.0, 6.0), uniform(0.3, 1.0), c_max);
    return m;
  }

  HybridProject hybrid_project() {
    HybridProject h;
    h.L = uniform(0.0, 100.0);
    h.C = h.L + uniform(1.0, 200.0);
    h.p0 = uniform(0.05, 0.5);
    h.p_bar = uniform(h.p0 + 0.05, 1.0);
    return h;
  }

  // CARA scaled to the model's wealth magnitude, or CRRA.
  RiskPreference concave_preference(double scale = 1.0) {
    if (coin()) return RiskPreference::cara(log_uniform(1e-3, 3.0) / scale);
    return RiskPreference::crra(uniform(0.2, 4.0));
  }

 private:
  std::mt19937_64 rng_;
};

// Direct two-term sums, written out independently of the library.
inline double cara_eu_raw(double lambda, double p, double w, double l) {
  return -p * std::exp(-lambda * w) - (1.0 - p) * std::exp(-lambda * l);
}

inline double crra_u(double sigma, double x) {
  return sigma == 1.0 ? std::log(x) : (std::pow(x, 1.0 - sigma) - 1.0) / (1.0 - sigma);
}

inline double oracle_eu(const RiskPreference& pref, double p, double w, double l) {
  if (pref.is_cara()) return cara_eu_raw(pref.coefficient(), p, w, l);
  if (pref.is_crra()) {
    double s = 0.0;
    if (p > 0.0) s += p * crra_u(pref.coefficient(), w);
    if (p < 1.0) s += (1.0 - p) * crra_u(pref.coefficient(), l);
    return s;
  }
  return p * w + (1.0 - p) * l;
}

// Index of the largest value, later index on exact ties.
inline std::size_t brute_argmax(const std::vector<double>& ys) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < ys.size(); ++i)
    if (ys[i] >= ys[best]) best = i;
  return best;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i)
    xs[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return xs;
}

// Plain bisection on a continuous function with f(lo) and f(hi) of opposite sign.
template <class F>
double bisect_root(F f, double lo, double hi, int iters = 200) {
  const bool lo_neg = f(lo) < 0.0;
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0.0) == lo_neg)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace testsupport

#endif  // RISKINV_TESTS_SUPPORT_HPP
