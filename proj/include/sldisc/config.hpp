#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sldisc/forward.hpp"
#include "sldisc/pipeline.hpp"

namespace sldisc {

/// constant + sum_k cos_k cos(k pi x / L) + sum_k sin_k sin((k + 1) pi x / L),
/// or samples from a potential file (exclusive with the series).
struct PotentialSource {
  double constant = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;
  std::string file;

  bool operator==(const PotentialSource&) const = default;
};

struct RunConfig {
  std::string mode;  // empty, or one of forward ip1 ip2 roundtrip stability basis-check

  double d = 0.5;
  PotentialSource q1;
  PotentialSource q2;
  double h1 = 0.0;
  double h2 = 0.0;
  double a1 = 1.0;
  double a2 = 0.0;
  std::optional<double> omega1;  // partial-spectrum inversion input; defaults to h1 + 1/2 int q1

  std::string spectrum_file;
  std::vector<long> index_set;

  int num_eigenvalues = 0;  // 0: truncation + guard
  int truncation = 64;
  int guard = 16;
  long tail_start = 0;
  int borg_modes = 0;
  int borg_pairs = 0;
  int borg_max_iterations = 100;
  double borg_tolerance = 1e-10;
  std::string borg_jacobian = "analytic";
  bool override_completeness = false;

  double rtol = 1e-10;
  double atol = 1e-10;
  double lambda_min = 1e-3;
  double max_condition = 1e12;
  int nodes_per_unit = kDefaultNodesPerUnit;

  std::uint64_t seed = 1;
  double epsilon = 0.0;  // invert: perturbation of the input; stability: single-epsilon sweep
  std::vector<double> epsilons{1e-3, 3e-3, 1e-2};
  int trials = 8;
  int fidelity_count = 32;
  int threads = 0;

  bool operator==(const RunConfig&) const = default;
};

/// Flat `key = value` text; `#` starts a comment. Relative file paths are
/// resolved against `base_dir`. Errors name the offending line.
RunConfig parse_config(const std::string& text, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);

/// Applies one `key = value` assignment; `where` prefixes error messages.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value,
                      const std::string& where = "command line");

/// Every key with its effective value; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& cfg);

Potential build_potential(const PotentialSource& src, double length, int nodes_per_unit);
ProblemSpec build_problem(const RunConfig& cfg);
PipelineOptions pipeline_options(const RunConfig& cfg);

}  // namespace sldisc
