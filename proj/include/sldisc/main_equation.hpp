#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sldisc/forward.hpp"
#include "sldisc/ode.hpp"
#include "sldisc/potential.hpp"

namespace sldisc {

/// v_n(x) = (c_sin sin(lambda x), c_cos cos(lambda x)) on [0, d].
struct BasisElement {
  long n = 0;
  double lambda = 0.0;
  double c_sin = 0.0;
  double c_cos = 0.0;
};

struct MainEqRHS {
  long n = 0;
  double f = 0.0;
};

/// One term of a trigonometric kernel: (s sin(lambda x), c cos(lambda x)).
struct TrigTerm {
  double lambda = 0.0;
  double s = 0.0;
  double c = 0.0;
};

/// K = (K1, K2) on [0, d]. Grid samples are always present. A kernel built
/// by solve_K also keeps its exact trigonometric expansion, and every
/// transform of K then uses the expansion instead of the samples.
struct KernelPair {
  double d = 0.0;
  Potential K1;
  Potential K2;
  std::vector<TrigTerm> expansion;

  bool has_expansion() const noexcept { return !expansion.empty(); }
  /// Samples a trigonometric expansion onto the standard grid over [0, d].
  static KernelPair from_terms(double d, std::vector<TrigTerm> terms,
                               int nodes_per_unit = kDefaultNodesPerUnit);
  static KernelPair zero(double d, int nodes_per_unit = kDefaultNodesPerUnit);
};

/// Coefficients of v_n from (q2, h2) on [0, 1 - d]; lambda must be positive.
BasisElement build_vn(const Potential& q2, double h2, double a1, double a2, double d,
                      double lambda, long n, const OdeOptions& opts = {});

/// Right-hand side of the main equation:
/// f = -c_sin (lambda cos(lambda d) + omega1 sin(lambda d))
///     - c_cos (-lambda sin(lambda d) + omega1 cos(lambda d)).
MainEqRHS build_fn(const BasisElement& v, double d, double omega1);
MainEqRHS build_fn(const Potential& q2, double h2, double a1, double a2, double d, double omega1,
                   double lambda, long n = 0, const OdeOptions& opts = {});

/// Basis element of the free problem (q2 = 0, h2 = 0, a2 = 0) at frequency
/// lambda >= 0; at lambda = 0 the sine part vanishes and c_cos = 1/a1.
BasisElement model_vn(double a1, double d, double lambda, long n);

/// int_0^d sin(a x) sin(b x) dx and int_0^d cos(a x) cos(b x) dx.
double sin_sin(double a, double b, double d);
double cos_cos(double a, double b, double d);

/// (u, v)_H in closed form.
double inner_product(const BasisElement& u, const BasisElement& v, double d);
/// (K, v)_H = c_sin psi1(lambda) + c_cos psi2(lambda).
double inner_product(const KernelPair& K, const BasisElement& v);

struct Psi {
  double psi1 = 0.0;  // int K1 sin(lambda x)
  double psi2 = 0.0;  // int K2 cos(lambda x)
};

/// Closed form for kernels with an expansion, otherwise exact integration
/// of the piecewise-linear samples against sin/cos. Odd/even by construction.
Psi psi_from_K(const KernelPair& K, double lambda);

/// int_0^d K1(x) x dx, the lambda -> 0 slope of psi1.
double psi1_slope_at_zero(const KernelPair& K);

/// Exact integrals of a piecewise-linear function against sin and cos.
Psi trig_moments(const Potential& f, double lambda);

struct SolveOptions {
  double max_condition = 1e12;  // of the diagonally normalized Gram matrix
  double min_gap = 1e-6;
  int nodes_per_unit = kDefaultNodesPerUnit;
};

struct KernelSolution {
  KernelPair K;
  std::vector<double> coeffs;  // K = sum coeffs[m] v_m
  double gram_condition = 0.0;
  double max_residual = 0.0;   // max |(K, v_n) - f_n| over the system
};

/// Galerkin solve of (K, v_n) = f_n for n < N: K = sum c_m v_m with
/// Gram c = f. Throws on near-coincident frequencies or a degenerate Gram
/// matrix.
KernelSolution solve_K(const std::vector<BasisElement>& basis, const std::vector<MainEqRHS>& rhs,
                       std::size_t N, double d, const SolveOptions& opts = {});

/// Closed-form Gram matrix, row-major N x N.
std::vector<double> gram_matrix(const std::vector<BasisElement>& basis, double d);

/// 2-norm condition number of D^{-1/2} G D^{-1/2}, D = diag(G).
double normalized_condition(const std::vector<double>& gram, std::size_t N);

struct BasisDiagnostics {
  double closeness = 0.0;                // sum ||v_n - v_n^0||^2
  std::vector<double> partial_sums;      // running values of the closeness sum
  double gram_condition = 0.0;
};

/// Compares each v_n with the free basis element at the index-matched zero
/// of the free characteristic function.
BasisDiagnostics basis_diagnostics(const std::vector<BasisElement>& basis, double a1, double d);

struct CompletenessReport {
  double density = 0.0;    // #{n in I : lambda_n <= Lambda} / Lambda
  double threshold = 0.0;  // 2 d / pi
  bool pass = false;       // density >= 0.9 threshold
  double gram_condition = 0.0;  // NaN when no basis is supplied
};

/// Advisory density test for completeness of the exponential system on
/// (-2d, 2d). Lambda is the largest supplied value.
CompletenessReport completeness_heuristic(const std::vector<long>& indices, double d,
                                          const std::vector<double>& lambdas,
                                          const std::vector<BasisElement>* basis = nullptr);

/// L2 distance in H between two kernels on the same grid.
double kernel_distance(const KernelPair& a, const KernelPair& b);

/// Files `<stem>_K1.txt`, `<stem>_K2.txt` in potential format, plus
/// `<stem>_terms.txt` (lines `lambda s c`) when an expansion exists.
void write_kernel(const KernelPair& K, const std::string& dir, const std::string& stem = "kernel");
KernelPair read_kernel(const std::string& dir, const std::string& stem = "kernel");
std::string format_terms(const std::vector<TrigTerm>& terms);
std::vector<TrigTerm> parse_terms(const std::string& text);

}  // namespace sldisc
