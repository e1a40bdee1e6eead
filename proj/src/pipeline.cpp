#include "sldisc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "sldisc/error.hpp"
#include "text_format.hpp"

namespace sldisc {

namespace {

constexpr double pi = std::numbers::pi;

// Runs f and prefixes any library error with the stage name.
template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// L2 distance after resampling `truth` onto the grid of `q` when needed.
double distance(const Potential& q, const Potential& truth) {
  if (q.same_grid(truth)) return q.l2_distance(truth);
  const Potential t = Potential::sampled(q.length(), [&](double x) { return truth(x); },
                                         static_cast<int>(std::lround((q.nodes() - 1) / q.length())));
  return q.l2_distance(t);
}

// Steps shared by both algorithms once K is known: zeros of eta, then the
// two-spectra fit.
void finish_from_kernel(ReconstructionReport& rep, double d, double lambda_max,
                        const PipelineOptions& opts) {
  const long resolved = static_cast<long>(std::floor(lambda_max * d / pi - 0.5)) + 1;
  const int P = opts.borg_pairs > 0 ? opts.borg_pairs : static_cast<int>(std::max(resolved, 0L));
  const int M = opts.borg_modes > 0 ? opts.borg_modes : std::min(24, P / 2);
  if (M < 1 || P < M + 4) {
    throw_domain("borg: too few resolved label pairs (" + std::to_string(P) +
                 ") for the two-spectra fit");
  }
  rep.borg_modes = M;
  rep.borg_pairs = P;

  rep.two_spectra = stage("eta zeros", [&] {
    TwoSpectra s;
    s.d = d;
    auto below = [P](long n) { return n < P; };
    s.mu = zeros_eta(rep.K, rep.omega1, 1, P).filter(below);
    s.nu = zeros_eta(rep.K, rep.omega1, 2, P).filter(below);
    return s;
  });

  BorgOptions b = opts.borg;
  b.modes = M;
  b.pairs = P;
  b.nodes_per_unit = opts.nodes_per_unit;
  const BorgResult br = stage("borg", [&] { return recover_q1_h1(rep.two_spectra, rep.omega1, b); });
  rep.q1 = br.q1;
  rep.h1 = br.h1;
  rep.residual_borg = br.residual;
  rep.constraint_error = br.constraint_error;
  rep.borg_iterations = br.iterations;
}

std::vector<BasisElement> basis_for(const Spectrum& sp, std::size_t N, const Potential& q2,
                                    double h2, double a1, double a2, double d,
                                    const OdeOptions& ode) {
  std::vector<BasisElement> basis;
  basis.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    basis.push_back(build_vn(q2, h2, a1, a2, d, sp.values[i], sp.indices[i], ode));
  }
  return basis;
}

void solve_main_equation(ReconstructionReport& rep, const std::vector<BasisElement>& basis,
                         double d, const PipelineOptions& opts) {
  stage("main equation", [&] {
    std::vector<MainEqRHS> rhs;
    rhs.reserve(basis.size());
    for (const BasisElement& v : basis) rhs.push_back(build_fn(v, d, rep.omega1));
    SolveOptions so = opts.solve;
    so.nodes_per_unit = opts.nodes_per_unit;
    const KernelSolution sol = solve_K(basis, rhs, basis.size(), d, so);
    rep.K = sol.K;
    rep.gram_condition = sol.gram_condition;
    rep.residual_main_eq = sol.max_residual;
    return 0;
  });
}

// Largest |lambda_n - lambda^_n| over entries of `input` with index < limit.
double fidelity(const ProblemSpec& recon, const Spectrum& input, long limit,
                const EigenOptions& eopts) {
  const Spectrum fwd = eigenvalues(recon, static_cast<int>(limit), eopts);
  std::map<long, double> byn;
  for (std::size_t i = 0; i < fwd.size(); ++i) byn[fwd.indices[i]] = fwd.values[i];
  double worst = 0.0;
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (input.indices[i] >= limit) continue;
    const auto it = byn.find(input.indices[i]);
    if (it == byn.end()) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(it->second - input.values[i]));
  }
  return worst;
}

}  // namespace

ReconstructionReport solve_ip1(const Spectrum& spectrum, const Potential& q2, double h2, double a1,
                               const PipelineOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const double d = 0.5;
  stage("input", [&] {
    spectrum.validate();
    if (!spectrum.is_full()) throw_domain("full-spectrum inversion needs a full spectrum with indices 0..N-1");
    if (std::abs(q2.length() - (1.0 - d)) > 1e-12) throw_domain("q2 must live on [0, 1/2]");
    if (!(a1 > 0.0)) throw_domain("a1 must be positive");
    if (opts.truncation < 1 || spectrum.size() < static_cast<std::size_t>(opts.truncation)) {
      throw_domain("spectrum has fewer values than the truncation");
    }
    return 0;
  });

  ReconstructionReport rep;
  rep.algorithm = "ip1";
  rep.truncation = opts.truncation;
  const AsymptoticConstants ab = stage("asymptotics", [&] {
    if (opts.shift == 0.0) return extract_ab(spectrum, opts.tail_start);
    // the low end may go nonpositive once unshifted; only the tail matters
    Spectrum raw;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
      const double e = spectrum.values[i] * spectrum.values[i] - opts.shift;
      if (e <= 0.0) continue;
      raw.indices.push_back(spectrum.indices[i]);
      raw.values.push_back(std::sqrt(e));
    }
    AsymptoticConstants c = extract_ab(raw, opts.tail_start);
    c.b += 0.5 * opts.shift;
    return c;
  });
  rep.ab = ab;
  rep.shift = opts.shift;
  const Omega1A2 oa = solve_omega1_a2(ab, a1, omega(q2, h2));
  rep.omega1 = oa.omega1;
  rep.a2 = oa.a2;

  const auto N = static_cast<std::size_t>(opts.truncation);
  const auto basis = stage("basis", [&] {
    return basis_for(spectrum, N, q2, h2, a1, rep.a2, d, opts.eigen.ode);
  });
  solve_main_equation(rep, basis, d, opts);
  finish_from_kernel(rep, d, spectrum.values[N - 1], opts);
  rep.wall_time = seconds_since(t0);
  return rep;
}

ReconstructionReport solve_ip2(const Spectrum& subspectrum, const Potential& q2, double h2,
                               double a1, double a2, double omega1, double d,
                               const PipelineOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  stage("input", [&] {
    subspectrum.validate();
    if (!(d > 0.0 && d < 0.5)) throw_domain("partial-spectrum inversion needs 0 < d < 1/2");
    if (std::abs(q2.length() - (1.0 - d)) > 1e-12) throw_domain("q2 must live on [0, 1 - d]");
    if (!(a1 > 0.0)) throw_domain("a1 must be positive");
    if (subspectrum.empty()) throw_domain("empty sub-spectrum");
    return 0;
  });

  ReconstructionReport rep;
  rep.algorithm = "ip2";
  rep.omega1 = omega1;
  rep.a2 = a2;
  const std::size_t N = std::min<std::size_t>(subspectrum.size(),
                                              static_cast<std::size_t>(std::max(opts.truncation, 1)));
  rep.truncation = static_cast<int>(N);
  const Spectrum used = subspectrum.filter([&](long n) { return n <= subspectrum.indices[N - 1]; });

  const auto basis = stage("basis", [&] {
    return basis_for(used, N, q2, h2, a1, a2, d, opts.eigen.ode);
  });
  stage("completeness", [&] {
    const CompletenessReport c = completeness_heuristic(used.indices, d, used.values);
    if (!c.pass && !opts.override_completeness) {
      throw_domain("index set likely deficient (density " + detail::fmt17(c.density) +
                   " below 0.9 x " + detail::fmt17(c.threshold) + ")");
    }
    return 0;
  });
  solve_main_equation(rep, basis, d, opts);
  finish_from_kernel(rep, d, used.values[N - 1], opts);
  rep.wall_time = seconds_since(t0);
  return rep;
}

double eigen_shift(const ProblemSpec& spec, const OdeOptions& opts) {
  const double e0 = eigenvalue_sq(spec, 0, opts);
  return e0 >= 1.0 ? 0.0 : std::ceil(1.0 - e0);
}

ReconstructionReport roundtrip(const ProblemSpec& spec, const PipelineOptions& opts,
                               const std::vector<long>& index_set) {
  const auto t0 = std::chrono::steady_clock::now();
  stage("input", [&] {
    spec.validate();
    return 0;
  });
  const double c = stage("forward", [&] { return eigen_shift(spec, opts.eigen.ode); });
  const ProblemSpec S = c != 0.0 ? shift_spectrum(spec, c) : spec;

  ReconstructionReport rep;
  Spectrum input;
  long limit = 0;
  if (std::abs(spec.d - 0.5) < 1e-15) {
    const int count = opts.truncation + opts.guard;
    input = stage("forward", [&] { return eigenvalues(S, count, opts.eigen); });
    PipelineOptions o = opts;
    o.shift = c;
    rep = solve_ip1(input, S.q2, S.h2, S.a1, o);
    rep.a2_error = std::abs(rep.a2 - spec.a2);
    limit = count / 2;
  } else {
    std::vector<long> I = index_set;
    if (I.empty()) {
      for (long k = 0; k < opts.truncation; ++k) I.push_back(2 * k);
    }
    std::sort(I.begin(), I.end());
    I.erase(std::unique(I.begin(), I.end()), I.end());
    if (I.front() < 0) throw_domain("input: negative index in the index set");
    const Spectrum all = stage("forward", [&] {
      return eigenvalues(S, static_cast<int>(I.back() + 1), opts.eigen);
    });
    input = all.filter([&](long n) { return std::binary_search(I.begin(), I.end(), n); });
    if (input.size() != I.size()) throw_domain("forward: eigenvalue missing for the index set");
    rep = solve_ip2(input, S.q2, S.h2, S.a1, S.a2, omega(S.q1, S.h1), S.d, opts);
    limit = (I.back() + 1) / 2;
  }

  ProblemSpec recon = S;
  recon.q1 = rep.q1;
  recon.h1 = rep.h1;
  recon.a2 = rep.a2;
  rep.spectrum_fidelity = stage("fidelity", [&] {
    return fidelity(recon, input, std::max(limit, 1L), opts.eigen);
  });

  rep.shift = c;
  if (c != 0.0) rep.q1 = rep.q1.shifted(-c);
  rep.q1_error = distance(rep.q1, spec.q1);
  rep.h1_error = std::abs(rep.h1 - spec.h1);
  rep.wall_time = seconds_since(t0);
  return rep;
}

StabilitySummary stability_sweep(const ProblemSpec& spec, const PipelineOptions& opts,
                                 const StabilityOptions& sopts) {
  stage("input", [&] {
    spec.validate();
    if (std::abs(spec.d - 0.5) > 1e-15) throw_domain("the stability sweep needs d = 1/2");
    if (sopts.trials < 1) throw_domain("at least one trial per epsilon is required");
    return 0;
  });
  const double c = stage("forward", [&] { return eigen_shift(spec, opts.eigen.ode); });
  const ProblemSpec S = c != 0.0 ? shift_spectrum(spec, c) : spec;
  const int count = opts.truncation + opts.guard;
  const Spectrum exact = stage("forward", [&] { return eigenvalues(S, count, opts.eigen); });

  PipelineOptions popts = opts;
  popts.shift = c;
  StabilitySummary out;
  out.baseline = solve_ip1(exact, S.q2, S.h2, S.a1, popts);
  out.baseline.shift = c;
  out.baseline.q1_error = distance(out.baseline.q1.shifted(-c), spec.q1);
  out.baseline.h1_error = std::abs(out.baseline.h1 - spec.h1);
  out.baseline.a2_error = std::abs(out.baseline.a2 - spec.a2);

  for (std::size_t i = 0; i < sopts.epsilons.size(); ++i) {
    for (int t = 0; t < sopts.trials; ++t) {
      StabilityRow r;
      r.epsilon = sopts.epsilons[i];
      r.trial = t;
      r.seed = sopts.seed + 1000 * i + static_cast<std::uint64_t>(t);
      out.rows.push_back(r);
    }
  }

  const int fid = std::min(sopts.fidelity_count, count);
  auto run = [&](StabilityRow& r) {
    try {
      const Spectrum pert = stage("perturb", [&] { return perturb_spectrum(exact, r.epsilon, r.seed); });
      r.rho = rho(exact, pert);
      const ReconstructionReport rep = solve_ip1(pert, S.q2, S.h2, S.a1, popts);
      r.q1_error = rep.q1.l2_distance(out.baseline.q1);
      r.h1_error = std::abs(rep.h1 - out.baseline.h1);
      r.q1_ratio = r.rho > 0.0 ? r.q1_error / r.rho : 0.0;
      r.h1_ratio = r.rho > 0.0 ? r.h1_error / r.rho : 0.0;
      r.residual_main_eq = rep.residual_main_eq;
      r.residual_borg = rep.residual_borg;
      ProblemSpec recon = S;
      recon.q1 = rep.q1;
      recon.h1 = rep.h1;
      recon.a2 = rep.a2;
      r.spectrum_fidelity = stage("fidelity", [&] { return fidelity(recon, pert, fid, opts.eigen); });
      r.ok = true;
    } catch (const Error& e) {
      r.ok = false;
      r.error = e.what();
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(
      sopts.threads > 0 ? static_cast<unsigned>(sopts.threads) : hw,
      static_cast<unsigned>(out.rows.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < out.rows.size(); k = next++) run(out.rows[k]);
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::vector<double> ratios;
  std::map<double, bool> clean;
  for (const StabilityRow& r : out.rows) {
    clean.try_emplace(r.epsilon, true);
    if (!r.ok) {
      ++out.failures;
      clean[r.epsilon] = false;
      continue;
    }
    if (r.rho > 0.0) ratios.push_back(r.q1_ratio);
    out.max_fidelity = std::max(out.max_fidelity, r.spectrum_fidelity);
  }
  for (const auto& [eps, ok] : clean) {
    if (ok) out.largest_clean_epsilon = std::max(out.largest_clean_epsilon, eps);
  }
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    const std::size_t m = ratios.size();
    out.median_ratio = m % 2 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
    out.C = ratios.back();
    out.max_to_median = out.median_ratio > 0.0 ? out.C / out.median_ratio : 0.0;
  }
  return out;
}

std::string format_stability_csv(const StabilitySummary& s) {
  std::string out =
      "epsilon,trial,seed,ok,rho,q1_error,h1_error,q1_ratio,h1_ratio,residual_main_eq,"
      "residual_borg,spectrum_fidelity,error\n";
  using detail::fmt17;
  for (const StabilityRow& r : s.rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    out += fmt17(r.epsilon) + ',' + std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' +
           (r.ok ? "1" : "0") + ',' + fmt17(r.rho) + ',' + fmt17(r.q1_error) + ',' +
           fmt17(r.h1_error) + ',' + fmt17(r.q1_ratio) + ',' + fmt17(r.h1_ratio) + ',' +
           fmt17(r.residual_main_eq) + ',' + fmt17(r.residual_borg) + ',' +
           fmt17(r.spectrum_fidelity) + ',' + err + '\n';
  }
  return out;
}

std::string format_report(const ReconstructionReport& r) {
  using detail::fmt17;
  std::string out;
  auto line = [&](const char* k, const std::string& v) { out += std::string(k) + ' ' + v + '\n'; };
  auto opt = [&](const char* k, const std::optional<double>& v) {
    if (v) line(k, fmt17(*v));
  };
  line("algorithm", r.algorithm);
  line("d", fmt17(r.K.d));
  line("h1", fmt17(r.h1));
  line("a2", fmt17(r.a2));
  line("omega1", fmt17(r.omega1));
  if (r.ab) {
    line("a", fmt17(r.ab->a));
    line("b", fmt17(r.ab->b));
    line("tail_start", std::to_string(r.ab->tail_start));
    line("tail_residual", fmt17(r.ab->residual));
  }
  line("shift", fmt17(r.shift));
  line("truncation", std::to_string(r.truncation));
  line("borg_modes", std::to_string(r.borg_modes));
  line("borg_pairs", std::to_string(r.borg_pairs));
  line("borg_iterations", std::to_string(r.borg_iterations));
  line("gram_condition", fmt17(r.gram_condition));
  line("residual_main_eq", fmt17(r.residual_main_eq));
  line("residual_borg", fmt17(r.residual_borg));
  line("constraint_error", fmt17(r.constraint_error));
  opt("q1_error", r.q1_error);
  opt("h1_error", r.h1_error);
  opt("a2_error", r.a2_error);
  opt("rho", r.rho);
  opt("spectrum_fidelity", r.spectrum_fidelity);
  line("wall_time", fmt17(r.wall_time));
  return out;
}

ReconstructionReport parse_report(const std::string& text) {
  ReconstructionReport r;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  AsymptoticConstants ab;
  bool has_ab = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    std::istringstream ls{std::string(t)};
    std::string key, value, extra;
    ls >> key >> value >> extra;
    auto fail = [&](const std::string& why) -> void {
      throw_config("report line " + std::to_string(lineno) + ": " + why);
    };
    if (value.empty() || !extra.empty()) fail("expected 'key value'");
    if (key == "algorithm") {
      r.algorithm = value;
      continue;
    }
    const auto num = detail::parse_real(value);
    if (!num) fail("malformed number for '" + key + "'");
    const double v = *num;
    auto as_int = [&] {
      const auto i = detail::parse_int(value);
      if (!i) fail("malformed integer for '" + key + "'");
      return *i;
    };
    if (key == "d") r.K.d = v;
    else if (key == "h1") r.h1 = v;
    else if (key == "a2") r.a2 = v;
    else if (key == "omega1") r.omega1 = v;
    else if (key == "a") { ab.a = v; has_ab = true; }
    else if (key == "b") { ab.b = v; has_ab = true; }
    else if (key == "tail_start") { ab.tail_start = as_int(); has_ab = true; }
    else if (key == "tail_residual") { ab.residual = v; has_ab = true; }
    else if (key == "shift") r.shift = v;
    else if (key == "truncation") r.truncation = static_cast<int>(as_int());
    else if (key == "borg_modes") r.borg_modes = static_cast<int>(as_int());
    else if (key == "borg_pairs") r.borg_pairs = static_cast<int>(as_int());
    else if (key == "borg_iterations") r.borg_iterations = static_cast<int>(as_int());
    else if (key == "gram_condition") r.gram_condition = v;
    else if (key == "residual_main_eq") r.residual_main_eq = v;
    else if (key == "residual_borg") r.residual_borg = v;
    else if (key == "constraint_error") r.constraint_error = v;
    else if (key == "q1_error") r.q1_error = v;
    else if (key == "h1_error") r.h1_error = v;
    else if (key == "a2_error") r.a2_error = v;
    else if (key == "rho") r.rho = v;
    else if (key == "spectrum_fidelity") r.spectrum_fidelity = v;
    else if (key == "wall_time") r.wall_time = v;
    else fail("unknown key '" + key + "'");
  }
  if (has_ab) r.ab = ab;
  return r;
}

void write_report(const ReconstructionReport& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw_io("cannot create directory '" + dir + "': " + ec.message());
  const std::filesystem::path p(dir);
  detail::write_file((p / "report.txt").string(), format_report(r));
  write_potential(r.q1, (p / "q1.txt").string());
  write_kernel(r.K, dir, "kernel");
  write_two_spectra(r.two_spectra, (p / "two_spectra.txt").string());
}

ReconstructionReport read_report(const std::string& dir) {
  const std::filesystem::path p(dir);
  ReconstructionReport r = parse_report(detail::read_file((p / "report.txt").string()));
  const double d = r.K.d;
  r.q1 = read_potential((p / "q1.txt").string());
  r.K = read_kernel(dir, "kernel");
  r.K.d = d;
  r.two_spectra = read_two_spectra((p / "two_spectra.txt").string(), d);
  return r;
}

}  // namespace sldisc
