#include "sldisc/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "sldisc/error.hpp"

namespace sldisc {

namespace {

constexpr double pi = std::numbers::pi;

void require_same_indices(const Spectrum& x, const Spectrum& y) {
  if (x.indices != y.indices) throw_domain("spectra must carry the same indices");
}

}  // namespace

AsymptoticConstants extract_ab(const Spectrum& sp, long tail_start) {
  if (sp.size() < 16) throw_domain("insufficient tail: need at least 16 eigenvalues");
  for (std::size_t i = 1; i < sp.size(); ++i) {
    if (sp.indices[i] != sp.indices[i - 1] + 1) {
      throw_domain("asymptotic constants need consecutive indices");
    }
  }
  auto gamma = [&](long n) {
    const double lam = sp.values[static_cast<std::size_t>(n - sp.indices.front())];
    return (lam - pi * n) * pi * n;
  };

  // complete pairs (2k, 2k+1) inside the available index range
  const long first_pair = (std::max(sp.indices.front(), 2L) + 1) / 2;
  const long last_pair = (sp.indices.back() - 1) / 2;
  const long pairs = last_pair - first_pair + 1;
  long k0;
  if (tail_start > 0) {
    if (tail_start < 2) throw_domain("tail start must be at least 2");
    k0 = (tail_start + 1) / 2;
    if (k0 > last_pair) throw_domain("insufficient tail: tail start beyond the spectrum");
  } else {
    const long use = (pairs + 3) / 4;
    k0 = last_pair - use + 1;
  }
  k0 = std::max(k0, first_pair);

  AsymptoticConstants c;
  c.tail_start = 2 * k0;
  double sa = 0.0, sb = 0.0;
  const long count = last_pair - k0 + 1;
  for (long k = k0; k <= last_pair; ++k) {
    const double ge = gamma(2 * k), go = gamma(2 * k + 1);
    if (!std::isfinite(ge) || !std::isfinite(go)) throw_domain("not in asymptotic class M");
    sa += 0.5 * (ge - go);
    sb += 0.5 * (ge + go);
  }
  c.a = sa / static_cast<double>(count);
  c.b = sb / static_cast<double>(count);

  // A convergent sequence leaves both halves of the window near the fit; a
  // residual O(n) drift (lambda_n - pi n not O(1/n)) does not.
  double r2 = 0.0, first_half = 0.0, second_half = 0.0;
  for (long n = 2 * k0; n <= 2 * last_pair + 1; ++n) {
    const double dev = gamma(n) - c.b - (n % 2 == 0 ? c.a : -c.a);
    r2 += dev * dev;
    (n - 2 * k0 < count ? first_half : second_half) += dev;
  }
  c.residual = std::sqrt(r2);
  const double drift = std::abs(second_half - first_half) / static_cast<double>(count);
  if (count >= 2 && drift > 0.05 * (1.0 + std::abs(c.a) + std::abs(c.b))) {
    throw_domain("not in asymptotic class M: gamma_n does not settle");
  }
  return c;
}

AsymptoticConstants ab_from_coefficients(double omega1, double omega2, double a1, double a2) {
  const double A = a1 + 1.0 / a1;
  const double B = a1 - 1.0 / a1;
  AsymptoticConstants c;
  c.a = a2 / A + (B / A) * (omega2 - omega1);
  c.b = a2 / A + omega1 + omega2;
  return c;
}

Omega1A2 solve_omega1_a2(const AsymptoticConstants& ab, double a1, double omega2) {
  if (!(a1 > 0.0)) throw_domain("a1 must be positive");
  const double A = a1 + 1.0 / a1;
  Omega1A2 r;
  r.omega1 = -(A * (ab.a - ab.b) + 2.0 * omega2 / a1) / (2.0 * a1);
  r.a2 = (ab.b - r.omega1 - omega2) * A;
  return r;
}

Spectrum perturb_spectrum(const Spectrum& sp, double epsilon, std::uint64_t seed) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw_domain("epsilon must be nonnegative");
  if (epsilon == 0.0 || sp.empty()) return sp;
  std::mt19937_64 rng(seed);
  std::vector<double> w(sp.size());
  double norm2 = 0.0;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    // raw bits keep the stream identical across standard libraries
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    const double n1 = static_cast<double>(sp.indices[i] + 1);
    w[i] = u / (n1 * n1);
    norm2 += w[i] * w[i] * n1 * n1;
  }
  if (!(norm2 > 0.0)) throw_domain("degenerate perturbation draw");
  const double s = epsilon / std::sqrt(norm2);
  Spectrum out = sp;
  for (std::size_t i = 0; i < sp.size(); ++i) out.values[i] += s * w[i];
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out.values[i] > 0.0) || (i > 0 && !(out.values[i] > out.values[i - 1]))) {
      throw_domain("perturbation too large: ordering or positivity lost");
    }
  }
  return out;
}

double rho(const Spectrum& x, const Spectrum& y) {
  require_same_indices(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = static_cast<double>(x.indices[i] + 1);
    const double d = x.values[i] - y.values[i];
    s += w * w * d * d;
  }
  return std::sqrt(s);
}

double rho_lambda(const Spectrum& x, const Spectrum& y) {
  require_same_indices(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x.values[i] - y.values[i];
    s += x.values[i] * x.values[i] * d * d;
  }
  return std::sqrt(s);
}

}  // namespace sldisc
