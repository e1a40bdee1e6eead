#pragma once

#include <cstdint>

#include "sldisc/forward.hpp"

namespace sldisc {

/// Limits of gamma_n = (lambda_n - pi n) pi n for d = 1/2:
/// gamma_n -> b + (-1)^n a.
struct AsymptoticConstants {
  double a = 0.0;
  double b = 0.0;
  long tail_start = 2;   // first index entering the estimate
  double residual = 0.0; // l2 size of gamma_n - b - (-1)^n a over the window
};

/// Averages over the last ceil(K/4) complete (even, odd) index pairs, or
/// over every pair from `tail_start` on when it is positive. The spectrum
/// must have consecutive indices and at least 16 values.
AsymptoticConstants extract_ab(const Spectrum& spectrum, long tail_start = 0);

/// (a, b) implied by the half-interval constants and the jump coefficients.
AsymptoticConstants ab_from_coefficients(double omega1, double omega2, double a1, double a2);

struct Omega1A2 {
  double omega1 = 0.0;
  double a2 = 0.0;
};

/// Exact inverse of ab_from_coefficients in (omega1, a2).
Omega1A2 solve_omega1_a2(const AsymptoticConstants& ab, double a1, double omega2);

/// Adds s u_n / (n + 1)^2 with u_n uniform in [-1, 1] from a seeded
/// mt19937_64, s chosen so that rho(input, output) = epsilon.
Spectrum perturb_spectrum(const Spectrum& spectrum, double epsilon, std::uint64_t seed);

/// sqrt(sum (n + 1)^2 (lambda_n - mu_n)^2); both spectra must carry the same indices.
double rho(const Spectrum& x, const Spectrum& y);

/// sqrt(sum lambda_n^2 (lambda_n - mu_n)^2), the metric used for sub-spectra.
double rho_lambda(const Spectrum& x, const Spectrum& y);

}  // namespace sldisc
