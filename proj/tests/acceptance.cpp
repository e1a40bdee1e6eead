// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "sldisc/asymptotics.hpp"
#include "sldisc/error.hpp"
#include "sldisc/forward.hpp"
#include "sldisc/main_equation.hpp"
#include "sldisc/pipeline.hpp"
#include "sldisc/reconstruction.hpp"

using namespace sldisc;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ProblemSpec planted_half() {
  ProblemSpec s;
  s.d = 0.5;
  s.q1 = Potential::sampled(0.5, [](double x) { return 0.4 * std::cos(2 * pi * x) + 0.2 * x; });
  s.q2 = Potential::sampled(0.5, [](double x) { return 0.3 * std::sin(pi * x); });
  s.h1 = 0.2;
  s.h2 = -0.1;
  s.a1 = 2.0;
  s.a2 = 0.5;
  return s;
}

// main-equation residuals of every reconstruction run by the suite
double worst_main_residual = 0.0;
long main_residual_runs = 0;

void record(const ReconstructionReport& r) {
  worst_main_residual = std::max(worst_main_residual, r.residual_main_eq);
  ++main_residual_runs;
}

Outcome c1() {
  const auto t0 = std::chrono::steady_clock::now();
  const Spectrum s = eigenvalues(ProblemSpec::free(0.5, 1.7), 50);
  const double secs = seconds_since(t0);
  double err = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.indices[i] != static_cast<long>(i + 1)) return {false, "unexpected index labels"};
    err = std::max(err, std::abs(s.values[i] - (i + 1) * pi));
  }
  return {s.size() == 50 && err <= 1e-8 && secs < 5.0,
          "max |lambda_n - n pi| = " + fmt("%.3g", err) + ", " + fmt("%.2f s", secs)};
}

Outcome c2() {
  const double a1 = 2.0;
  const Spectrum s = eigenvalues(ProblemSpec::free(0.25, a1), 50);
  const std::vector<double> model = model_zeros_quarter(a1, 51);  // includes lambda = 0
  double model_err = 0.0, even_err = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const long n = s.indices[i];
    model_err = std::max(model_err, std::abs(s.values[i] - model[static_cast<std::size_t>(n)]));
    if (n % 2 == 0) even_err = std::max(even_err, std::abs(s.values[i] - pi * n));
  }
  const bool ok = s.size() == 50 && s.indices.back() == 50 && model_err <= 1e-8 && even_err <= 1e-8;
  return {ok, "vs model zeros " + fmt("%.3g", model_err) + ", lambda_2n vs 2 pi n " + fmt("%.3g", even_err)};
}

Outcome c3() {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemSpec s = planted_half();
  PipelineOptions o;
  o.truncation = 48;  // 48 + 16 guard = 64 eigenvalues in total
  o.guard = 16;
  const ReconstructionReport r = roundtrip(s, o);
  record(r);
  const double secs = seconds_since(t0);
  const bool ok = *r.q1_error <= 5e-2 && *r.h1_error <= 5e-2 && *r.a2_error <= 1e-2 && secs < 120.0;
  return {ok, "q1 " + fmt("%.3g", *r.q1_error) + ", h1 " + fmt("%.3g", *r.h1_error) + ", a2 " +
                  fmt("%.3g", *r.a2_error) + ", " + fmt("%.1f s", secs)};
}

Outcome c4() {
  ProblemSpec s = planted_half();
  s = shift_spectrum(s, 1.0);
  const Spectrum sp = eigenvalues(s, 100);
  const AsymptoticConstants got = extract_ab(sp);
  const AsymptoticConstants want =
      ab_from_coefficients(omega(s.q1, s.h1), omega(s.q2, s.h2), s.a1, s.a2);
  const double ea = std::abs(got.a - want.a), eb = std::abs(got.b - want.b);
  return {ea <= 1e-2 && eb <= 1e-2, "|da| = " + fmt("%.3g", ea) + ", |db| = " + fmt("%.3g", eb)};
}

double raw_condition(const std::vector<double>& g, std::size_t n) {
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> G(
      g.data(), static_cast<long>(n), static_cast<long>(n));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

Outcome c6() {
  const double a1 = 2.0, d = 0.5;
  const Potential zero = Potential::constant(0.5, 0.0);
  std::vector<BasisElement> free_basis{model_vn(a1, d, 0.0, 0)};
  for (long n = 1; n < 64; ++n) free_basis.push_back(build_vn(zero, 0.0, a1, 0.0, d, n * pi, n));
  const std::vector<double> g = gram_matrix(free_basis, d);
  double off = 0.0, diag = 0.0;
  for (std::size_t i = 0; i < 64; ++i) {
    for (std::size_t j = 0; j < 64; ++j) {
      const double v = g[i * 64 + j];
      if (i != j) {
        off = std::max(off, std::abs(v));
        continue;
      }
      const double want = i == 0 ? 0.5 / (a1 * a1) : (i % 2 == 0 ? 0.25 / (a1 * a1) : 0.25 * a1 * a1);
      diag = std::max(diag, std::abs(v - want));
    }
  }

  const ProblemSpec s = shift_spectrum(planted_half(), 1.0);
  const Spectrum sp = eigenvalues(s, 64);
  std::vector<BasisElement> basis;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    basis.push_back(build_vn(s.q2, s.h2, s.a1, s.a2, s.d, sp.values[i], sp.indices[i]));
  }
  const std::vector<double> gp = gram_matrix(basis, s.d);
  const double raw = raw_condition(gp, basis.size());
  const double normalized = normalized_condition(gp, basis.size());
  const bool ok = off <= 1e-8 && diag <= 1e-8 && raw < 50.0;  // quadrature-level tolerance
  return {ok, "free off-diagonal " + fmt("%.2g", off) + ", diagonal " + fmt("%.2g", diag) +
                  "; perturbed condition " + fmt("%.4g", raw) + " (normalized " +
                  fmt("%.4g", normalized) + ")"};
}

Outcome c7() {
  const ProblemSpec s = planted_half();
  StabilityOptions so;  // epsilons 1e-3, 3e-3, 1e-2; 8 trials; fidelity for n < 32
  const StabilitySummary r = stability_sweep(s, PipelineOptions{}, so);
  record(r.baseline);
  bool bounded = true;
  for (const StabilityRow& row : r.rows) {
    if (row.ok) {
      bounded = bounded && row.q1_error <= r.C * row.rho * (1 + 1e-12);
      worst_main_residual = std::max(worst_main_residual, row.residual_main_eq);
      ++main_residual_runs;
    }
  }
  const bool ok = r.failures == 0 && bounded && r.max_to_median < 3.0 && r.max_fidelity <= 1e-6;
  return {ok, std::to_string(r.rows.size() - r.failures) + "/" + std::to_string(r.rows.size()) +
                  " trials ok, C " + fmt("%.4g", r.C) + ", max/median " + fmt("%.3f", r.max_to_median) +
                  ", spectrum fidelity " + fmt("%.3g", r.max_fidelity) + " (limit 1e-6)"};
}

Outcome c8() {
  ProblemSpec s;
  s.d = 0.25;
  s.q1 = Potential::sampled(0.25, [](double x) { return 0.5 * std::cos(4 * pi * x) + 0.3 * x; });
  s.q2 = Potential::sampled(0.75, [](double x) { return 0.3 * std::sin(pi * x); });
  s.h1 = 0.2;
  s.h2 = -0.1;
  s.a1 = 2.0;
  s.a2 = 0.5;
  PipelineOptions o;
  o.truncation = 41;
  std::vector<long> I;
  for (long n = 0; n <= 40; ++n) I.push_back(2 * n);
  const ReconstructionReport r = roundtrip(s, o, I);
  record(r);
  return {*r.q1_error <= 5e-2, "q1 error " + fmt("%.3g", *r.q1_error) + " from 41 even-index eigenvalues"};
}

Outcome c9() {
  const Potential q = Potential::sampled(0.5, [](double x) { return std::cos(2 * pi * x); });
  const double h = 0.5;
  BorgOptions o;
  o.modes = 24;
  o.pairs = 40;
  const TwoSpectra target = half_spectra(q, h, o.pairs);
  const BorgResult r = recover_q1_h1(target, omega(q, h), o);
  const double check = borg_residual_check(r.q1, r.h1, target, o.pairs);
  const double err = r.q1.l2_distance(q);
  return {r.residual <= 1e-8 && check <= 1e-8 && err <= 5e-3,
          "residual " + fmt("%.3g", r.residual) + ", independent recheck " + fmt("%.3g", check) +
              ", |q1 - q1^| " + fmt("%.3g", err)};
}

Outcome c10() {
  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  long checks = 0, bad = 0;
  double worst = 0.0;
  auto same = [&](double a, double b) {
    ++checks;
    const double e = std::abs(a - b) / std::max(1.0, std::abs(a));
    worst = std::max(worst, e);
    if (e > 1e-12) ++bad;
  };
  for (int trial = 0; trial < 100; ++trial) {
    ProblemSpec s;
    s.d = 0.15 + 0.35 * (0.5 * (u(rng) + 1.0));
    const double c1 = u(rng), c2 = u(rng), s1 = u(rng);
    s.q1 = Potential::sampled(s.d, [&](double x) { return c1 + c2 * std::cos(3 * x); }, 256);
    s.q2 = Potential::sampled(1 - s.d, [&](double x) { return s1 * std::sin(5 * x); }, 256);
    s.h1 = u(rng);
    s.h2 = u(rng);
    s.a1 = 1.0 + 0.9 * u(rng);
    s.a2 = u(rng);
    const double lam = 0.5 + 40.0 * 0.5 * (u(rng) + 1.0);
    const PhiValue p = integrate_phi(s.q1, s.h1, lam, s.d), m = integrate_phi(s.q1, s.h1, -lam, s.d);
    same(p.phi, m.phi);
    same(p.dphi, m.dphi);
    same(char_delta(s, lam), char_delta(s, -lam));
    const KernelPair K = KernelPair::from_terms(
        s.d, {{3.0 + u(rng), u(rng), u(rng)}, {9.0 + u(rng), u(rng), u(rng)}}, 256);
    const double w = u(rng);
    const Eta ep = eval_eta(K, w, lam), em = eval_eta(K, w, -lam);
    same(ep.eta1, em.eta1);
    same(ep.eta2, em.eta2);
    const Psi pp = psi_from_K(K, lam), pm = psi_from_K(K, -lam);
    same(pp.psi1, -pm.psi1);
    same(pp.psi2, pm.psi2);
    const KernelPair G{s.d, K.K1, K.K2, {}};  // grid route
    const Psi gp = psi_from_K(G, lam), gm = psi_from_K(G, -lam);
    same(gp.psi1, -gm.psi1);
    same(gp.psi2, gm.psi2);
  }
  return {bad == 0, std::to_string(checks - bad) + "/" + std::to_string(checks) +
                        " parity checks, worst relative gap " + fmt("%.2g", worst)};
}

Outcome c5() {
  return {main_residual_runs > 0 && worst_main_residual <= 1e-8,
          "max |(K, v_n) - f_n| = " + fmt("%.3g", worst_main_residual) + " over " +
              std::to_string(main_residual_runs) + " runs"};
}

}  // namespace

int main() {
  // criterion 5 aggregates the reconstruction runs of 3, 7 and 8, so it runs last
  const std::vector<std::pair<int, std::function<Outcome()>>> order{
      {1, c1}, {2, c2}, {3, c3}, {4, c4}, {6, c6}, {7, c7}, {8, c8}, {9, c9}, {10, c10}, {5, c5}};
  const char* names[] = {"",
                         "free spectrum at d = 1/2",
                         "free model zeros at d = 1/4",
                         "full-spectrum round trip",
                         "asymptotic constants a, b",
                         "main-equation residuals",
                         "Riesz diagnostics",
                         "stability sweep",
                         "partial-spectrum round trip at d = 1/4",
                         "two-spectra step",
                         "parity invariants"};
  std::vector<std::string> lines(11);
  int failed = 0;
  for (const auto& [id, run] : order) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    lines[id] = "criterion " + std::to_string(id) + " " + (o.pass ? "PASS" : "FAIL") + "  " +
                names[id] + ": " + o.detail;
  }
  for (int id = 1; id <= 10; ++id) std::printf("%s\n", lines[id].c_str());
  std::printf("%d/10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
