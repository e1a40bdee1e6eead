#include "sldisc/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "sldisc/error.hpp"

namespace sldisc {

namespace {

template <std::size_t N>
using StateN = std::array<double, N>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

template <std::size_t N>
struct StepControl {
  double h_init;
  double h_cap;
  std::array<bool, N> relative;  // scale error by solution magnitude
};

// Integrates y' = rhs(q(x), y) from 0 to x_end. Steps are clipped at grid
// nodes; inside a cell q is linear. `on_accept` sees every accepted state.
template <std::size_t N, class Rhs, class OnAccept>
void run_dp5(const Potential& q, double x_end, StateN<N>& y, const OdeOptions& opts,
             const StepControl<N>& ctl, Rhs&& rhs, OnAccept&& on_accept) {
  using State = StateN<N>;
  const auto vals = q.values();
  const double dx = q.spacing();
  std::size_t cell = 0;
  double x = 0.0;
  double h = ctl.h_init;

  auto qat = [&](double xx) {
    const double x0 = q.x(cell);
    return vals[cell] + (vals[cell + 1] - vals[cell]) * ((xx - x0) / dx);
  };

  State k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
  rhs(qat(x), y, k1);

  while (x < x_end) {
    const double node = q.x(cell + 1);
    const double target = std::min(node, x_end);
    const double remaining = target - x;
    if (remaining <= 0.0) {
      ++cell;
      continue;
    }
    double step = std::min({h, ctl.h_cap, remaining});
    const bool hits = step >= remaining * (1.0 - 1e-12);
    if (hits) step = remaining;

    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + step * a21 * k1[i];
    rhs(qat(x + c2 * step), tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + step * (a31 * k1[i] + a32 * k2[i]);
    rhs(qat(x + c3 * step), tmp, k3);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + step * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(qat(x + c4 * step), tmp, k4);
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = y[i] + step * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    rhs(qat(x + c5 * step), tmp, k5);
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = y[i] + step * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                              a65 * k5[i]);
    }
    const double xn = hits ? target : x + step;
    rhs(qat(xn), tmp, k6);
    for (std::size_t i = 0; i < N; ++i) {
      ynew[i] = y[i] + step * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    }
    rhs(qat(xn), ynew, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double ei = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                e6 * k6[i] + e7 * k7[i]);
      double sc = opts.atol;
      if (ctl.relative[i]) sc += opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(ei) / sc);
    }

    if (err <= 1.0) {
      x = xn;
      y = ynew;
      k1 = k7;
      const bool at_node = hits && target == node;
      on_accept(y, at_node);
      // (0.9 / 5)^5: below this the growth factor saturates at 5
      const double grow = err < 1.889568e-4 ? 5.0 : 0.9 * std::pow(err, -0.2);
      if (!(hits && step < h)) h = step * grow;
      if (at_node) ++cell;
    } else {
      h = step * std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (!(h > 1e-14 * (1.0 + x_end))) throw_domain("ODE step size underflow");
    }
  }
}

long band(double theta) {
  return static_cast<long>(std::floor((theta + 0.5 * std::numbers::pi) / std::numbers::pi));
}

template <bool WithNorm>
ShootResult shoot_impl(const Potential& q, double energy, double y0, double dy0, double x_end,
                       const OdeOptions& opts, std::vector<double>* node_values) {
  if (!std::isfinite(energy) || !std::isfinite(y0) || !std::isfinite(dy0)) {
    throw_domain("non-finite input to the ODE integrator");
  }
  if (!(x_end >= 0.0) || x_end > q.length() * (1.0 + 1e-14)) {
    throw_domain("integration end point outside the potential interval");
  }
  x_end = std::min(x_end, q.length());
  if (node_values) {
    node_values->clear();
    node_values->push_back(y0);
  }
  if (x_end == 0.0) return {y0, dy0, 0, 0.0};

  constexpr std::size_t N = WithNorm ? 3 : 2;
  using State = StateN<N>;

  const double lam = energy > 0.0 ? std::sqrt(energy) : 0.0;
  const bool prufer = lam * x_end > opts.prufer_threshold && energy > 4.0 * q.max_abs() &&
                      (y0 != 0.0 || dy0 != 0.0);

  if (prufer) {
    // y = R0 e^u cos(theta), y' = -lam R0 e^u sin(theta).
    const double theta0 = std::atan2(-dy0 / lam, y0);
    const double r0 = std::hypot(y0, dy0 / lam);
    const double r0sq = r0 * r0;
    const double inv_lam = 1.0 / lam;
    State s{};
    s[0] = theta0;
    StepControl<N> ctl{std::min(q.spacing(), 0.2 * inv_lam), q.spacing(), {}};
    if constexpr (WithNorm) ctl.relative[2] = true;
    run_dp5<N>(
        q, x_end, s, opts, ctl,
        [lam, inv_lam, r0sq](double qx, const State& v, State& out) {
          const double c = std::cos(v[0]);
          const double sn = std::sin(v[0]);
          out[0] = lam - qx * inv_lam * c * c;
          out[1] = -qx * inv_lam * sn * c;
          if constexpr (WithNorm) out[2] = r0sq * std::exp(2.0 * v[1]) * c * c;
        },
        [&](const State& v, bool at_node) {
          if (node_values && at_node) {
            node_values->push_back(r0 * std::exp(v[1]) * std::cos(v[0]));
          }
        });
    const double r = r0 * std::exp(s[1]);
    ShootResult res{r * std::cos(s[0]), -lam * r * std::sin(s[0]), band(s[0]) - band(theta0),
                    0.0};
    if constexpr (WithNorm) res.norm2 = s[2];
    return res;
  }

  State s{};
  s[0] = y0;
  s[1] = dy0;
  const double scale = std::sqrt(std::max(std::abs(energy), 1.0));
  const double cap = energy > 0.0 ? 1.0 / scale : q.length();
  StepControl<N> ctl{std::min(q.spacing(), 0.2 / scale), cap, {}};
  ctl.relative.fill(true);
  long zeros = 0;
  int sign = y0 > 0.0 ? 1 : (y0 < 0.0 ? -1 : 0);
  run_dp5<N>(
      q, x_end, s, opts, ctl,
      [energy](double qx, const State& v, State& out) {
        out[0] = v[1];
        out[1] = (qx - energy) * v[0];
        if constexpr (WithNorm) out[2] = v[0] * v[0];
      },
      [&](const State& v, bool at_node) {
        const int sg = v[0] > 0.0 ? 1 : (v[0] < 0.0 ? -1 : 0);
        if (sg != 0) {
          if (sign != 0 && sg != sign) ++zeros;
          sign = sg;
        }
        if (node_values && at_node) node_values->push_back(v[0]);
      });
  ShootResult res{s[0], s[1], zeros, 0.0};
  if constexpr (WithNorm) res.norm2 = s[2];
  return res;
}

}  // namespace

ShootResult shoot(const Potential& q, double energy, double y0, double dy0, double x_end,
                  const OdeOptions& opts) {
  return shoot_impl<false>(q, energy, y0, dy0, x_end, opts, nullptr);
}

ShootResult shoot_with_norm(const Potential& q, double energy, double y0, double dy0,
                            double x_end, const OdeOptions& opts,
                            std::vector<double>* node_values) {
  return shoot_impl<true>(q, energy, y0, dy0, x_end, opts, node_values);
}

PhiValue integrate_phi_energy(const Potential& q, double h, double energy, double x_end,
                              const OdeOptions& opts) {
  const ShootResult r = shoot(q, energy, 1.0, h, x_end, opts);
  return {r.y, r.dy};
}

PhiValue integrate_phi(const Potential& q, double h, double lambda, double x_end,
                       const OdeOptions& opts) {
  if (!std::isfinite(lambda)) throw_domain("lambda must be finite");
  return integrate_phi_energy(q, h, lambda * lambda, x_end, opts);
}

double omega(const Potential& q, double h) { return h + 0.5 * q.integral(); }

double prufer_angle(double y, double dy, long zeros) {
  const double s = y < 0.0 ? -1.0 : 1.0;
  return static_cast<double>(zeros) * std::numbers::pi + std::atan2(std::abs(y), s * dy);
}

}  // namespace sldisc
