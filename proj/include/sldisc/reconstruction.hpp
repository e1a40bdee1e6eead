#pragma once

#include <string>
#include <vector>

#include "sldisc/forward.hpp"
#include "sldisc/main_equation.hpp"

namespace sldisc {

struct Eta {
  double eta1 = 0.0;
  double eta2 = 0.0;
};

/// eta1 = cos(l d) + omega1 sin(l d)/l + psi1(l)/l, with its l -> 0 limit;
/// eta2 = -l sin(l d) + omega1 cos(l d) + psi2(l). Both even in l.
Eta eval_eta(const KernelPair& K, double omega1, double lambda);

struct ZeroOptions {
  double lambda_min = 1e-3;
  double tolerance = 1e-11;
};

/// First N positive zeros of eta1 (which = 1) or eta2 (which = 2). Zeros are
/// labelled against (n + 1/2) pi / d for eta1 and n pi / d for eta2, so a
/// zero that is missing near the origin leaves a gap in the labels.
Spectrum zeros_eta(const KernelPair& K, double omega1, int which, int N,
                   const ZeroOptions& opts = {});

/// eta2 / eta1; throws at a pole.
double weyl(const KernelPair& K, double omega1, double lambda);

/// Dirichlet (mu, L0) and Neumann (nu, L1) spectra at x = d of the left
/// half problem, each with its own labels.
struct TwoSpectra {
  double d = 0.5;
  Spectrum mu;
  Spectrum nu;
};

/// Number of label pairs breaking nu_n < mu_n < nu_{n+1}.
long interlacing_violations(const TwoSpectra& s);

enum class EndCondition { dirichlet, neumann };

/// lambda_n^2 of -y'' + q y = E y on [0, length], y'(0) = h y(0), with
/// y(length) = 0 or y'(length) = 0. Any sign.
double half_eigenvalue_sq(const Potential& q, double h, EndCondition end, long n,
                          const OdeOptions& opts = {});

/// Labels 0..N-1 of both half spectra; entries with lambda below 1e-3
/// (including all nonpositive E) are left out.
TwoSpectra half_spectra(const Potential& q, double h, int N, const OdeOptions& opts = {});

/// Same spectra by an independent route: a scan of phi(d, lambda) and
/// phi'(d, lambda) for sign changes refined by bisection, with labels from
/// the Pruefer count at the bottom of the scan.
TwoSpectra half_spectra_scan(const Potential& q, double h, int N, const OdeOptions& opts = {});

/// Lines `n mu_n nu_n`; `-` marks a label present in only one spectrum.
std::string format_two_spectra(const TwoSpectra& s);
TwoSpectra parse_two_spectra(const std::string& text, double d);
void write_two_spectra(const TwoSpectra& s, const std::string& path);
TwoSpectra read_two_spectra(const std::string& path, double d);

enum class BorgJacobian { analytic, finite_difference };

struct BorgOptions {
  int modes = 24;          // M cosine coefficients
  int pairs = 0;           // labels 0..pairs-1 enter the fit; 0 means 2M
  int max_iterations = 100;
  double tolerance = 1e-10;  // weighted residual counted as an exact fit
  double initial_damping = 1e-3;
  BorgJacobian jacobian = BorgJacobian::analytic;
  double fd_step = 1e-6;
  OdeOptions ode;
  int nodes_per_unit = kDefaultNodesPerUnit;
};

struct BorgResult {
  Potential q1;
  double h1 = 0.0;
  std::vector<double> coeffs;
  double residual = 0.0;          // sqrt(sum (n+1)^2 [(mu - mu^)^2 + (nu - nu^)^2])
  double constraint_error = 0.0;  // |h1 + 1/2 int q1 - omega1|
  int iterations = 0;
  bool exact = false;             // residual <= tolerance
};

/// Levenberg-Marquardt fit of q1 = sum_k c_k cos(k pi x / d), k < M, with
/// h1 = omega1 - 1/2 int q1, to the two spectra. Starts from q1 = 0.
BorgResult recover_q1_h1(const TwoSpectra& spectra, double omega1, const BorgOptions& opts = {});

/// Weighted residual of (q1, h1) against the spectra over labels < pairs,
/// evaluated through half_spectra_scan.
double borg_residual_check(const Potential& q1, double h1, const TwoSpectra& spectra, int pairs,
                           const OdeOptions& opts = {});

}  // namespace sldisc
