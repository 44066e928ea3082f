#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "rh/params.hpp"

namespace rh {

/// Bisection on a sign-changing bracket. f(lo) and f(hi) must have opposite
/// signs (or one of them vanish). Stops when the bracket is narrower than tol.
template <typename Scalar, typename F>
Scalar bisect(F&& f, Scalar lo, Scalar hi, Scalar tol = Scalar(1e-12), int max_iter = 200) {
  Scalar flo = f(lo);
  const Scalar fhi = f(hi);
  if (flo == Scalar(0)) return lo;
  if (fhi == Scalar(0)) return hi;
  if ((flo > 0) == (fhi > 0)) throw DomainError("bisect: bracket does not change sign");
  for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    const Scalar fm = f(mid);
    if (fm == Scalar(0)) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return lo + (hi - lo) / Scalar(2);
}

template <typename Scalar>
struct ScalarExtremum {
  Scalar x{};
  Scalar value{};
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
/// Endpoint values are included in the comparison.
template <typename Scalar, typename F>
ScalarExtremum<Scalar> golden_maximize(F&& f, Scalar lo, Scalar hi, Scalar xtol = Scalar(1e-12)) {
  const Scalar inv_phi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  ScalarExtremum<Scalar> best{lo, f(lo)};
  if (const Scalar fh = f(hi); fh > best.value) best = {hi, fh};
  Scalar a = lo;
  Scalar b = hi;
  Scalar c = b - inv_phi * (b - a);
  Scalar d = a + inv_phi * (b - a);
  Scalar fc = f(c);
  Scalar fd = f(d);
  for (int it = 0; it < 200 && (b - a) > xtol; ++it) {
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
  if (fc > best.value) best = {c, fc};
  if (fd > best.value) best = {d, fd};
  return best;
}

template <typename Scalar, typename F>
ScalarExtremum<Scalar> golden_minimize(F&& f, Scalar lo, Scalar hi, Scalar xtol = Scalar(1e-12)) {
  auto r = golden_maximize([&](Scalar x) { return -f(x); }, lo, hi, xtol);
  return {r.x, -r.value};
}

}  // namespace rh
