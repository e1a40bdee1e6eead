#pragma once

#include <vector>

#include "sldisc/potential.hpp"

namespace sldisc {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  /// Switch to the phase/amplitude form once sqrt(E) * span exceeds this.
  double prufer_threshold = 50.0;
};

/// Value and derivative of a solution at the end of the integration span.
struct PhiValue {
  double phi = 0.0;
  double dphi = 0.0;
};

/// Solution of -y'' + q y = E y from arbitrary Cauchy data, plus the number
/// of sign changes of y on (0, x_end].
struct ShootResult {
  double y = 0.0;
  double dy = 0.0;
  long zeros = 0;
  double norm2 = 0.0;  // integral of y^2, filled by shoot_with_norm only
};

/// Adaptive Dormand-Prince 5(4) on (y, y'); steps never cross a grid node so
/// the linear potential inside a step is smooth. For large sqrt(E) the
/// Pruefer phase/amplitude system is integrated instead.
ShootResult shoot(const Potential& q, double energy, double y0, double dy0, double x_end,
                  const OdeOptions& opts = {});

/// As `shoot`, additionally integrating y^2 over the span. When
/// `node_values` is given it receives y at every grid node in [0, x_end].
ShootResult shoot_with_norm(const Potential& q, double energy, double y0, double dy0,
                            double x_end, const OdeOptions& opts = {},
                            std::vector<double>* node_values = nullptr);

/// phi(x_end, lambda) with phi(0) = 1, phi'(0) = h. Depends on lambda only
/// through lambda^2, so it is even in lambda.
PhiValue integrate_phi(const Potential& q, double h, double lambda, double x_end,
                       const OdeOptions& opts = {});

/// Same as integrate_phi but parameterised by E = lambda^2 (any sign).
PhiValue integrate_phi_energy(const Potential& q, double h, double energy, double x_end,
                              const OdeOptions& opts = {});

/// h + 1/2 * integral of q over its interval.
double omega(const Potential& q, double h);

/// Continuous Pruefer angle of (y, y') given the number of zeros of y
/// accumulated so far: zeros * pi + atan2(|y|, sign(y) y').
double prufer_angle(double y, double dy, long zeros);

}  // namespace sldisc
