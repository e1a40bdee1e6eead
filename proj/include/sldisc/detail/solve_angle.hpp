#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "sldisc/error.hpp"

namespace sldisc::detail {

// Newton on theta(E) - target with a bisection fallback once a bracket is
// known. `angle(E, dtheta)` returns theta and writes d theta / dE. The
// angle carries integrator noise, so after a few Newton steps the search
// falls back to plain bisection, which always terminates.
template <class AngleFn>
double solve_angle(AngleFn&& angle, double target, double guess) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double lo = -inf, hi = inf;
  double e = guess;
  for (int iter = 0; iter < 200; ++iter) {
    double slope = 0.0;
    const double f = angle(e, slope) - target;
    if (f == 0.0) return e;
    if (f < 0.0) lo = e; else hi = e;
    double next = e - f / slope;
    const bool finite_bracket = std::isfinite(lo) && std::isfinite(hi);
    if (finite_bracket && iter >= 30) next = 0.5 * (lo + hi);
    if (!std::isfinite(next) || !(slope > 0.0) || (finite_bracket && !(next > lo && next < hi))) {
      if (finite_bracket) {
        next = 0.5 * (lo + hi);
      } else {
        const double span = std::max(1.0, std::abs(e));
        next = std::isfinite(lo) ? e + span : e - span;
      }
    } else if (!finite_bracket) {
      // Unbounded side: cap the step so a flat angle cannot fling E away.
      const double cap = 4.0 * std::max(1.0, std::abs(e));
      if (std::abs(next - e) > cap) next = e + std::copysign(cap, next - e);
    }
    const double tol = 4e-15 * std::max(1.0, std::abs(e));
    if (std::abs(next - e) <= tol) return next;
    if (finite_bracket && hi - lo <= tol) return 0.5 * (lo + hi);
    e = next;
  }
  throw_domain("indexed eigenvalue search did not converge");
}

}  // namespace sldisc::detail
