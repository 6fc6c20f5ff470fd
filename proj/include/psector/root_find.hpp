#pragma once

#include <cmath>
#include <utility>

#include "psector/types.hpp"

namespace psector {

struct RootResult {
  double x;
  int iterations;
  bool converged;
};

/// Root of a continuous function on a sign-changing bracket [lo, hi].
///
/// Bisection refined by a safeguarded secant (false position with the
/// Illinois weight halving).  A bisection step is forced whenever the secant
/// point falls outside the bracket or two consecutive steps failed to halve
/// its width, so the bracket shrinks at least geometrically.
template <class F>
RootResult solve_bracketed(F&& f, double lo, double hi, double x_tol, int max_iter = 300) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, 0, true};
  if (fhi == 0.0) return {hi, 0, true};
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw DomainError("root bracket does not change sign");
  }
  int side = 0;
  double width_before = hi - lo;
  int slow_steps = 0;
  for (int it = 1; it <= max_iter; ++it) {
    double x;
    if (slow_steps >= 2) {
      x = 0.5 * (lo + hi);
      slow_steps = 0;
    } else {
      x = (lo * fhi - hi * flo) / (fhi - flo);
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    }
    const double fx = f(x);
    if (fx == 0.0) return {x, it, true};
    if ((fx > 0.0) == (fhi > 0.0)) {
      hi = x;
      fhi = fx;
      if (side == 1) flo *= 0.5;
      side = 1;
    } else {
      lo = x;
      flo = fx;
      if (side == -1) fhi *= 0.5;
      side = -1;
    }
    const double width = hi - lo;
    if (width > 0.5 * width_before) {
      ++slow_steps;
    } else {
      slow_steps = 0;
      width_before = width;
    }
    if (width <= x_tol) {
      const double xs = (lo * fhi - hi * flo) / (fhi - flo);
      return {(xs >= lo && xs <= hi) ? xs : 0.5 * (lo + hi), it, true};
    }
  }
  return {0.5 * (lo + hi), max_iter, false};
}

}  // namespace psector
