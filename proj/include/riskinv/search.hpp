#ifndef RISKINV_SEARCH_HPP
#define RISKINV_SEARCH_HPP

#include <cmath>
#include <cstddef>

namespace riskinv {

struct ScalarMax {
  double x;
  double fx;
  std::size_t iterations;
};

/// Golden-section search for the maximum of a unimodal f on [a, b]. Stops when
/// the bracket is narrower than abs_tol. Returns the better of the two
/// interior probes; callers compare against the endpoints themselves.
template <class F>
ScalarMax golden_section_maximize(F&& f, double a, double b, double abs_tol,
                                  std::size_t max_iter = 500) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  std::size_t it = 0;
  while (b - a > abs_tol && it < max_iter) {
    ++it;
    // Ties move right so that flat tops resolve toward larger investment.
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  if (fc > fd) return {c, fc, it};
  return {d, fd, it};
}

struct Bracket {
  double lo;
  double hi;
  std::size_t iterations;
};

/// Bisection for the switch point of a monotone predicate with pred(lo) == false
/// and pred(hi) == true. Halves until done(lo, hi) holds.
template <class Pred, class Done>
Bracket bisect_switch(Pred&& pred, double lo, double hi, Done&& done, std::size_t max_iter = 400) {
  std::size_t it = 0;
  while (!done(lo, hi) && it < max_iter) {
    ++it;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // no representable midpoint left
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return {lo, hi, it};
}

}  // namespace riskinv

#endif  // RISKINV_SEARCH_HPP
