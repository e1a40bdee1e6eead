#include "sldisc/commands.hpp"

#include <chrono>
#include <filesystem>
#include <map>

#include "sldisc/error.hpp"
#include "text_format.hpp"

namespace sldisc {

namespace {

namespace fs = std::filesystem;
using detail::fmt17;

struct Lines {
  std::string text;
  void add(const std::string& k, const std::string& v) { text += k + ' ' + v + '\n'; }
  void add(const std::string& k, double v) { add(k, fmt17(v)); }
  void add(const std::string& k, long v) { add(k, std::to_string(v)); }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Spectrum restrict(const Spectrum& s, const std::vector<long>& I) {
  if (I.empty()) return s;
  const Spectrum r = s.filter([&](long n) { return std::binary_search(I.begin(), I.end(), n); });
  if (r.size() != I.size()) throw_domain("spectrum lacks entries for part of index_set");
  return r;
}

const std::string& require_spectrum(const RunConfig& cfg, const std::string& command) {
  if (cfg.spectrum_file.empty()) {
    throw_config("config: missing required key 'spectrum_file' for " + command);
  }
  return cfg.spectrum_file;
}

std::string forward(const RunConfig& cfg, const fs::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemSpec spec = build_problem(cfg);
  const PipelineOptions o = pipeline_options(cfg);
  const int N = cfg.num_eigenvalues > 0 ? cfg.num_eigenvalues : cfg.truncation + cfg.guard;
  const Spectrum sp = eigenvalues(spec, N, o.eigen);
  write_spectrum(sp, (out / "spectrum.txt").string());
  Lines r;
  r.add("command", "forward");
  r.add("d", spec.d);
  r.add("count", static_cast<long>(sp.size()));
  r.add("first_index", sp.indices.front());
  r.add("lambda_first", sp.values.front());
  r.add("lambda_last", sp.values.back());
  r.add("omega1", omega(spec.q1, spec.h1));
  r.add("omega2", omega(spec.q2, spec.h2));
  r.add("eigen_shift", eigen_shift(spec, o.eigen.ode));
  r.add("wall_time", seconds_since(t0));
  return r.text;
}

std::string invert(const RunConfig& cfg, const fs::path& out) {
  if (cfg.d != 0.5) throw_config("config: invert needs d = 0.5");
  const Spectrum input = read_spectrum(require_spectrum(cfg, "invert"));
  const Potential q2 = build_potential(cfg.q2, 0.5, cfg.nodes_per_unit);
  Spectrum sp = input;
  if (cfg.epsilon > 0.0) sp = perturb_spectrum(input, cfg.epsilon, cfg.seed);
  ReconstructionReport rep = solve_ip1(sp, q2, cfg.h2, cfg.a1, pipeline_options(cfg));
  if (cfg.epsilon > 0.0) rep.rho = rho(input, sp);
  write_report(rep, out.string());
  return format_report(rep);
}

std::string invert_partial(const RunConfig& cfg, const fs::path& out) {
  if (!cfg.omega1) throw_config("config: missing required key 'omega1' for invert-partial");
  const Spectrum sp = restrict(read_spectrum(require_spectrum(cfg, "invert-partial")), cfg.index_set);
  const Potential q2 = build_potential(cfg.q2, 1.0 - cfg.d, cfg.nodes_per_unit);
  const ReconstructionReport rep =
      solve_ip2(sp, q2, cfg.h2, cfg.a1, cfg.a2, *cfg.omega1, cfg.d, pipeline_options(cfg));
  write_report(rep, out.string());
  return format_report(rep);
}

std::string roundtrip_cmd(const RunConfig& cfg, const fs::path& out) {
  const ReconstructionReport rep = roundtrip(build_problem(cfg), pipeline_options(cfg), cfg.index_set);
  write_report(rep, out.string());
  return format_report(rep);
}

std::string stability(const RunConfig& cfg, const fs::path& out) {
  StabilityOptions so;
  so.epsilons = cfg.epsilon > 0.0 ? std::vector<double>{cfg.epsilon} : cfg.epsilons;
  so.trials = cfg.trials;
  so.seed = cfg.seed;
  so.fidelity_count = cfg.fidelity_count;
  so.threads = cfg.threads;
  const StabilitySummary s = stability_sweep(build_problem(cfg), pipeline_options(cfg), so);
  detail::write_file((out / "stability.csv").string(), format_stability_csv(s));
  write_report(s.baseline, (out / "baseline").string());
  Lines r;
  r.add("command", "stability");
  r.add("rows", static_cast<long>(s.rows.size()));
  r.add("failures", s.failures);
  r.add("C", s.C);
  r.add("median_ratio", s.median_ratio);
  r.add("max_to_median", s.max_to_median);
  r.add("largest_clean_epsilon", s.largest_clean_epsilon);
  r.add("max_spectrum_fidelity", s.max_fidelity);
  r.add("baseline_q1_error", *s.baseline.q1_error);
  r.add("baseline_h1_error", *s.baseline.h1_error);
  r.add("baseline_a2_error", *s.baseline.a2_error);
  return r.text;
}

std::string basis_check(const RunConfig& cfg, const fs::path& out) {
  const ProblemSpec spec = build_problem(cfg);
  const PipelineOptions o = pipeline_options(cfg);
  Spectrum sp;
  if (!cfg.spectrum_file.empty()) {
    sp = read_spectrum(cfg.spectrum_file);
  } else {
    const int N = cfg.num_eigenvalues > 0 ? cfg.num_eigenvalues : cfg.truncation + cfg.guard;
    sp = eigenvalues(spec, N, o.eigen);
  }
  sp = restrict(sp, cfg.index_set);
  std::vector<BasisElement> basis;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    basis.push_back(build_vn(spec.q2, spec.h2, spec.a1, spec.a2, spec.d, sp.values[i],
                             sp.indices[i], o.eigen.ode));
  }
  const BasisDiagnostics diag = basis_diagnostics(basis, spec.a1, spec.d);
  const CompletenessReport comp = completeness_heuristic(sp.indices, spec.d, sp.values, &basis);
  std::string table;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    table += std::to_string(basis[i].n) + ' ' + fmt17(basis[i].lambda) + ' ' +
             fmt17(basis[i].c_sin) + ' ' + fmt17(basis[i].c_cos) + ' ' +
             fmt17(diag.partial_sums[i]) + '\n';
  }
  detail::write_file((out / "basis.txt").string(), table);
  Lines r;
  r.add("command", "basis-check");
  r.add("count", static_cast<long>(basis.size()));
  r.add("closeness", diag.closeness);
  r.add("gram_condition", diag.gram_condition);
  r.add("density", comp.density);
  r.add("density_threshold", comp.threshold);
  r.add("completeness_pass", comp.pass ? "true" : "false");
  return r.text;
}

}  // namespace

std::string run_command(const RunConfig& cfg, const std::string& command,
                        const std::string& out_dir) {
  static const std::map<std::string, std::string> mode_of{
      {"forward", "forward"},     {"invert", "ip1"},         {"invert-partial", "ip2"},
      {"roundtrip", "roundtrip"}, {"stability", "stability"}, {"basis-check", "basis-check"}};
  const auto it = mode_of.find(command);
  if (it == mode_of.end()) throw_config("unknown command '" + command + "'");
  if (!cfg.mode.empty() && cfg.mode != it->second) {
    throw_config("config mode '" + cfg.mode + "' does not match command '" + command + "'");
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw_io("cannot create directory '" + out_dir + "': " + ec.message());
  const fs::path out(out_dir);
  detail::write_file((out / "config_effective.txt").string(), format_config(cfg));

  std::string report;
  if (command == "forward") report = forward(cfg, out);
  else if (command == "invert") report = invert(cfg, out);
  else if (command == "invert-partial") report = invert_partial(cfg, out);
  else if (command == "roundtrip") report = roundtrip_cmd(cfg, out);
  else if (command == "stability") report = stability(cfg, out);
  else report = basis_check(cfg, out);
  detail::write_file((out / "report.txt").string(), report);
  return report;
}

}  // namespace sldisc
