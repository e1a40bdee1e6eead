#pragma once

#include <string>
#include <vector>

#include "sldisc/ode.hpp"
#include "sldisc/potential.hpp"

namespace sldisc {

/// Boundary value problem with a jump at x = d. q1 lives on [0, d]; q2 is
/// the potential on [d, 1] read from the right end, q2(t) = q(1 - t).
struct ProblemSpec {
  double d = 0.5;
  Potential q1;
  Potential q2;
  double h1 = 0.0;
  double h2 = 0.0;
  double a1 = 1.0;
  double a2 = 0.0;

  /// Throws a domain error unless 0 < d <= 1/2, a1 > 0 and the potential
  /// lengths match d and 1 - d.
  void validate() const;

  /// q == 0, h1 = h2 = a2 = 0.
  static ProblemSpec free(double d, double a1, int nodes_per_unit = kDefaultNodesPerUnit);
};

/// Positive square roots of eigenvalues with their indices n (n counts all
/// eigenvalues from the bottom, so gaps in `indices` mark a sub-spectrum).
struct Spectrum {
  std::vector<long> indices;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  bool empty() const noexcept { return values.empty(); }
  /// Strictly increasing positive values and strictly increasing indices.
  void validate() const;
  /// Indices are exactly 0, 1, ..., size() - 1.
  bool is_full() const;
  /// Entries whose index satisfies pred.
  template <class Pred>
  Spectrum filter(Pred&& pred) const {
    Spectrum out;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (pred(indices[i])) {
        out.indices.push_back(indices[i]);
        out.values.push_back(values[i]);
      }
    }
    return out;
  }
};

struct EigenOptions {
  OdeOptions ode;
  // Roots below lambda_min are counted into the index offset but not
  // reported. It must sit well clear of 0 so that a zero eigenvalue is
  // classified reliably.
  double lambda_min = 1e-3;
  double bisection_width = 1e-12;
  double newton_step = 1e-6;    // central-difference step for the polish
  int max_refinement_depth = 12;
};

/// a1 phi1 phi2' + a1^{-1} phi1' phi2 + a2 phi1 phi2 at (d, lambda) and
/// (1 - d, lambda).
double char_delta(const ProblemSpec& spec, double lambda, const OdeOptions& opts = {});

/// y'(1) + h2 y(1) for the solution shot from x = 0 with y(0) = 1,
/// y'(0) = h1 through the jump conditions. Identical to char_delta as a
/// function; used as an independent check of the jump convention.
double char_delta_shooting(const ProblemSpec& spec, double lambda, const OdeOptions& opts = {});

/// Number of eigenvalues lambda_n^2 strictly below `energy`, by the
/// Pruefer angle of the shot solution at x = 1.
long count_eigenvalues_below(const ProblemSpec& spec, double energy,
                             const OdeOptions& opts = {});

/// lambda_n^2 for a given index n, any sign, by safeguarded Newton on the
/// Pruefer angle. Independent of the scanning route in `eigenvalues`.
double eigenvalue_sq(const ProblemSpec& spec, long n, const OdeOptions& opts = {});

/// First N positive zeros of char_delta with their indices. Brackets come
/// from a scan that also tracks the eigenvalue count; refinement is
/// bisection followed by one Newton polish.
Spectrum eigenvalues(const ProblemSpec& spec, int N, const EigenOptions& opts = {});

/// Nonnegative zeros of (lambda/2)((a1 + 1/a1) sin(lambda) + (a1 - 1/a1) sin(lambda/2)),
/// the free d = 1/4 characteristic function.
std::vector<double> model_zeros_quarter(double a1, int N);

/// Nonnegative zeros of the free characteristic function for general d:
/// (a1 + 1/a1) sin(lambda) + (a1 - 1/a1) sin(lambda (1 - 2d)), with lambda = 0 first.
std::vector<double> free_model_zeros(double a1, double d, int N);

/// q_j -> q_j + c for both halves; every lambda_n^2 moves by c.
ProblemSpec shift_spectrum(const ProblemSpec& spec, double c);

/// Lines `n lambda_n`, sorted by n.
std::string format_spectrum(const Spectrum& s);
Spectrum parse_spectrum(const std::string& text);
void write_spectrum(const Spectrum& s, const std::string& path);
Spectrum read_spectrum(const std::string& path);

namespace detail {

/// Solve theta(E) = target for a monotone increasing angle function that
/// also returns d theta / dE. Used for every indexed eigenvalue search.
template <class AngleFn>
double solve_angle(AngleFn&& angle, double target, double guess);

}  // namespace detail

}  // namespace sldisc

#include "sldisc/detail/solve_angle.hpp"
