#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sldisc/asymptotics.hpp"
#include "sldisc/forward.hpp"
#include "sldisc/main_equation.hpp"
#include "sldisc/reconstruction.hpp"

namespace sldisc {

struct PipelineOptions {
  int truncation = 64;       // Galerkin size of the main equation
  int guard = 16;            // extra eigenvalues for the tail estimate of a, b
  long tail_start = 0;       // 0: automatic window in extract_ab
  int borg_modes = 0;        // 0: min(24, pairs / 2)
  int borg_pairs = 0;        // 0: labels resolved by the largest eigenvalue used
  bool override_completeness = false;
  // Constant already added to both potentials of the problem behind the
  // input spectrum. full-spectrum inversion estimates a, b on sqrt(lambda^2 - shift) and
  // restores the shift exactly (b moves by shift / 2).
  double shift = 0.0;
  SolveOptions solve;
  EigenOptions eigen;
  BorgOptions borg;          // modes and pairs are taken from the fields above
  int nodes_per_unit = kDefaultNodesPerUnit;
};

struct ReconstructionReport {
  std::string algorithm;     // "ip1" or "ip2"
  Potential q1;
  double h1 = 0.0;
  double a2 = 0.0;
  double omega1 = 0.0;
  std::optional<AsymptoticConstants> ab;  // full-spectrum inversion only
  double shift = 0.0;        // constant added to both potentials before inversion
  int truncation = 0;
  int borg_modes = 0;
  int borg_pairs = 0;
  int borg_iterations = 0;
  double gram_condition = 0.0;
  double residual_main_eq = 0.0;
  double residual_borg = 0.0;
  double constraint_error = 0.0;
  std::optional<double> q1_error;
  std::optional<double> h1_error;
  std::optional<double> a2_error;
  std::optional<double> rho;
  std::optional<double> spectrum_fidelity;  // max |lambda_n - lambda^_n| for n < N/2
  double wall_time = 0.0;
  KernelPair K;
  TwoSpectra two_spectra;
};

/// Full-spectrum inversion (d = 1/2): full spectrum plus (q2, h2, a1) to (q1, h1, a2).
ReconstructionReport solve_ip1(const Spectrum& spectrum, const Potential& q2, double h2, double a1,
                               const PipelineOptions& opts = {});

/// Partial-spectrum inversion (d < 1/2): sub-spectrum over its own indices plus
/// (q2, h2, a1, a2, omega1) to (q1, h1).
ReconstructionReport solve_ip2(const Spectrum& subspectrum, const Potential& q2, double h2,
                               double a1, double a2, double omega1, double d,
                               const PipelineOptions& opts = {});

/// Constant c to add to both potentials so that lambda_0^2 >= 1; 0 when
/// the problem already satisfies this.
double eigen_shift(const ProblemSpec& spec, const OdeOptions& opts = {});

/// Forward spectrum, inversion, and errors against the planted truth. At
/// d = 1/2 it runs the full-spectrum inversion on truncation + guard eigenvalues; otherwise
/// the partial-spectrum inversion on `index_set` (default: the first `truncation` even indices).
ReconstructionReport roundtrip(const ProblemSpec& spec, const PipelineOptions& opts = {},
                               const std::vector<long>& index_set = {});

struct StabilityRow {
  double epsilon = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double rho = 0.0;
  double q1_error = 0.0;   // against the unperturbed reconstruction
  double h1_error = 0.0;
  double q1_ratio = 0.0;   // q1_error / rho
  double h1_ratio = 0.0;
  double residual_main_eq = 0.0;
  double residual_borg = 0.0;
  double spectrum_fidelity = 0.0;  // against the perturbed input, n < fidelity_count
};

struct StabilityOptions {
  std::vector<double> epsilons{1e-3, 3e-3, 1e-2};
  int trials = 8;
  std::uint64_t seed = 1;
  int fidelity_count = 32;
  int threads = 0;  // 0: hardware concurrency
};

struct StabilitySummary {
  std::vector<StabilityRow> rows;
  ReconstructionReport baseline;
  long failures = 0;
  double C = 0.0;                // max q1 ratio over successful rows
  double median_ratio = 0.0;
  double max_to_median = 0.0;
  double largest_clean_epsilon = 0.0;  // largest epsilon with every trial successful
  double max_fidelity = 0.0;
};

/// Lipschitz stability sweep at d = 1/2. Trials are independent and may run
/// concurrently; row order and values do not depend on the thread count.
StabilitySummary stability_sweep(const ProblemSpec& spec, const PipelineOptions& opts = {},
                                 const StabilityOptions& sopts = {});

/// `epsilon,trial,seed,ok,rho,q1_error,h1_error,q1_ratio,h1_ratio,...` with header.
std::string format_stability_csv(const StabilitySummary& s);

/// `key value` lines, 17 significant digits; optional fields only when set.
std::string format_report(const ReconstructionReport& r);
/// Scalar fields of a report.txt; q1, K and the spectra are read separately.
ReconstructionReport parse_report(const std::string& text);

/// report.txt, q1.txt, kernel_*.txt and two_spectra.txt in `dir`.
void write_report(const ReconstructionReport& r, const std::string& dir);
/// Inverse of write_report.
ReconstructionReport read_report(const std::string& dir);

}  // namespace sldisc
