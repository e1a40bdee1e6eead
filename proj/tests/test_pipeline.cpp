#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "sldisc/error.hpp"
#include "sldisc/pipeline.hpp"

using namespace sldisc;
using std::numbers::pi;

namespace {

ProblemSpec planted_half() {
  ProblemSpec s;
  s.d = 0.5;
  s.q1 = Potential::sampled(0.5, [](double x) { return 0.4 * std::cos(2 * pi * x); });
  s.q2 = Potential::sampled(0.5, [](double x) { return 0.3 * std::sin(pi * x); });
  s.h1 = 0.2;
  s.h2 = -0.1;
  s.a1 = 2.0;
  s.a2 = 0.5;
  return s;
}

std::string strip_wall_time(std::string s) {
  const auto p = s.find("wall_time");
  return p == std::string::npos ? s : s.substr(0, p);
}

}  // namespace

TEST_CASE("round trip of the free problem at d = 1/2") {
  PipelineOptions o;
  o.truncation = 32;
  const ReconstructionReport r = roundtrip(ProblemSpec::free(0.5, 1.5), o);
  CHECK(r.shift == 1.0);  // lambda_0 = 0 forces a shift
  CHECK(*r.q1_error <= 1e-8);
  CHECK(*r.h1_error <= 1e-8);
  CHECK(*r.a2_error <= 1e-8);
}

TEST_CASE("full-spectrum round trip of a planted problem") {
  const ProblemSpec s = planted_half();
  const ReconstructionReport r = roundtrip(s);
  MESSAGE("q1 error " << *r.q1_error << ", h1 error " << *r.h1_error << ", a2 error " << *r.a2_error);
  CHECK(*r.q1_error <= 5e-2);
  CHECK(*r.h1_error <= 5e-2);
  CHECK(*r.a2_error <= 1e-2);
  CHECK(r.residual_main_eq <= 1e-8);
  CHECK(r.gram_condition < 50.0);
  CHECK(*r.spectrum_fidelity < 1e-5);
}

TEST_CASE("continuous coefficients reduce to the half-inverse problem") {
  ProblemSpec s = planted_half();
  s.a1 = 1.0;
  s.a2 = 0.0;
  PipelineOptions o;
  o.truncation = 48;
  const ReconstructionReport r = roundtrip(s, o);
  CHECK(*r.q1_error <= 5e-2);
  CHECK(*r.a2_error <= 1e-2);
}

TEST_CASE("partial-spectrum inversion at d = 1/4 from even indices") {
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
  const ReconstructionReport r = roundtrip(s, o);
  MESSAGE("d = 1/4 q1 error " << *r.q1_error);
  CHECK(r.algorithm == "ip2");
  CHECK(*r.q1_error <= 5e-2);

  std::vector<long> sparse;
  for (long k = 0; k < 21; ++k) sparse.push_back(4 * k);
  CHECK_THROWS_WITH_AS(roundtrip(s, o, sparse), doctest::Contains("likely deficient"), Error);
  o.override_completeness = true;
  o.borg_modes = 4;
  CHECK_NOTHROW(roundtrip(s, o, sparse));
}

TEST_CASE("partial-spectrum inversion on free data recovers zero") {
  PipelineOptions o;
  o.truncation = 24;
  const ReconstructionReport r = roundtrip(ProblemSpec::free(0.25, 2.0), o);
  CHECK(*r.q1_error <= 1e-8);
  CHECK(*r.h1_error <= 1e-8);
}

TEST_CASE("stage errors carry the stage name") {
  const ProblemSpec s = planted_half();
  Spectrum sp = eigenvalues(shift_spectrum(s, 1.0), 10);
  PipelineOptions o;
  o.truncation = 8;
  CHECK_THROWS_WITH_AS(solve_ip1(sp, s.q2, s.h2, s.a1, o), doctest::Contains("asymptotics:"), Error);
  sp.indices[0] = 1;
  sp.indices[1] = 2;
  CHECK_THROWS_WITH_AS(solve_ip1(sp, s.q2, s.h2, s.a1, o), doctest::Contains("input:"), Error);
}

TEST_CASE("stability sweep is deterministic and independent of the thread count") {
  const ProblemSpec s = planted_half();
  PipelineOptions o;
  o.truncation = 32;
  StabilityOptions so;
  so.epsilons = {1e-3, 1e-2};
  so.trials = 2;
  so.threads = 1;
  const StabilitySummary a = stability_sweep(s, o, so);
  so.threads = 3;
  const StabilitySummary b = stability_sweep(s, o, so);
  CHECK(format_stability_csv(a) == format_stability_csv(b));
  CHECK(a.failures == 0);
  CHECK(a.rows.size() == 4);
  for (const StabilityRow& r : a.rows) {
    CHECK(r.rho == doctest::Approx(r.epsilon).epsilon(1e-8));
    CHECK(r.q1_error <= a.C * r.rho * (1 + 1e-12));
  }
  CHECK(a.max_to_median < 3.0);
}

TEST_CASE("report text round trip is exact") {
  ReconstructionReport r;
  r.algorithm = "ip1";
  r.K = KernelPair::zero(0.5, 64);
  r.h1 = 1.0 / 3.0;
  r.a2 = -2.5e-7;
  r.omega1 = std::sqrt(2.0);
  r.ab = AsymptoticConstants{0.1, 0.2, 12, 1e-9};
  r.truncation = 64;
  r.borg_modes = 16;
  r.q1_error = 0.123456789012345678;
  r.wall_time = 1.5;
  const ReconstructionReport p = parse_report(format_report(r));
  CHECK(format_report(p) == format_report(r));
  CHECK(p.h1 == r.h1);
  CHECK(p.omega1 == r.omega1);
  CHECK(*p.q1_error == *r.q1_error);
  CHECK(!p.rho);
  CHECK_THROWS_WITH_AS(parse_report("h1 1\nbogus 2\n"), doctest::Contains("line 2"), Error);
}

TEST_CASE("report directory round trip") {
  PipelineOptions o;
  o.truncation = 24;
  o.nodes_per_unit = 256;
  ProblemSpec s = ProblemSpec::free(0.5, 1.5, 256);
  const ReconstructionReport r = roundtrip(s, o);
  const auto dir = std::filesystem::temp_directory_path() / "sldisc_report_test";
  std::filesystem::remove_all(dir);
  write_report(r, dir.string());
  const ReconstructionReport back = read_report(dir.string());
  CHECK(format_report(back) == format_report(r));
  CHECK(back.q1 == r.q1);
  CHECK(back.K.K1 == r.K.K1);
  CHECK(back.K.expansion.size() == r.K.expansion.size());
  CHECK(back.two_spectra.mu.values == r.two_spectra.mu.values);
  CHECK(strip_wall_time(format_report(roundtrip(s, o))) == strip_wall_time(format_report(r)));
  std::filesystem::remove_all(dir);
}
