#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "sldisc/error.hpp"
#include "sldisc/forward.hpp"

using namespace sldisc;
using std::numbers::pi;

namespace {

ProblemSpec smooth_spec(double d, double a1, double a2, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double c0 = u(rng), c1 = u(rng), s0 = u(rng), s1 = u(rng);
  ProblemSpec s;
  s.d = d;
  s.q1 = Potential::sampled(d, [&](double x) { return c0 + c1 * std::cos(3 * x); });
  s.q2 = Potential::sampled(1 - d, [&](double x) { return s0 * x + s1 * std::sin(4 * x); });
  s.h1 = 0.5 * u(rng);
  s.h2 = 0.5 * u(rng);
  s.a1 = a1;
  s.a2 = a2;
  return s;
}

// Brute-force sign scan at step 1e-4 followed by bisection.
std::vector<double> scan_roots(auto&& f, double lo, double hi) {
  std::vector<double> roots;
  const double step = 1e-4;
  double a = lo, fa = f(a);
  while (a < hi) {
    const double b = a + step, fb = f(b);
    if ((fa < 0) != (fb < 0)) {
      double x0 = a, x1 = b, f0 = fa;
      for (int i = 0; i < 80; ++i) {
        const double m = 0.5 * (x0 + x1), fm = f(m);
        if ((fm < 0) == (f0 < 0)) { x0 = m; f0 = fm; } else { x1 = m; }
      }
      roots.push_back(0.5 * (x0 + x1));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

}  // namespace

TEST_CASE("char_delta closed forms") {
  const ProblemSpec f = ProblemSpec::free(0.5, 1.0);
  CHECK(char_delta(f, pi / 2) == doctest::Approx(-pi / 2).epsilon(1e-10));
  for (int n = 1; n < 6; ++n) CHECK(std::abs(char_delta(f, n * pi)) < 1e-8);

  const ProblemSpec g = ProblemSpec::free(0.25, 2.0);
  const double A = 2.5, B = 1.5;
  for (double lam : {0.3, 2.0, 7.7, 31.0, 95.0}) {
    const double expect = -(lam / 2) * (A * std::sin(lam) + B * std::sin(lam / 2));
    CHECK(std::abs(char_delta(g, lam) - expect) < 1e-8 * (1 + lam));
  }
}

TEST_CASE("char_delta agrees with shooting through the jump") {
  for (unsigned seed = 1; seed < 6; ++seed) {
    const ProblemSpec s = smooth_spec(seed % 2 ? 0.5 : 0.3, 0.5 + seed * 0.4, 0.7 - 0.3 * seed, seed);
    for (double lam : {0.2, 3.3, 17.0, 80.0, 190.0}) {
      const double a = char_delta(s, lam);
      const double b = char_delta_shooting(s, lam);
      CHECK(std::abs(a - b) < 1e-7 * (1 + lam * lam));
    }
  }
}

TEST_CASE("char_delta is even") {
  const ProblemSpec s = smooth_spec(0.4, 1.7, 0.2, 9);
  for (double lam : {0.9, 13.0, 140.0}) CHECK(char_delta(s, lam) == char_delta(s, -lam));
}

TEST_CASE("free spectrum d = 1/2") {
  const Spectrum sp = eigenvalues(ProblemSpec::free(0.5, 3.0), 5);
  REQUIRE(sp.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(sp.indices[i] == i + 1);  // lambda_0 = 0 is excluded
    CHECK(std::abs(sp.values[i] - (i + 1) * pi) < 1e-8);
  }
}

TEST_CASE("d = 1/4 free spectrum matches the model zeros") {
  const Spectrum sp = eigenvalues(ProblemSpec::free(0.25, 2.0), 40);
  const auto z = model_zeros_quarter(2.0, 41);
  for (std::size_t i = 0; i < sp.size(); ++i) {
    CHECK(sp.indices[i] == static_cast<long>(i + 1));
    CHECK(std::abs(sp.values[i] - z[i + 1]) < 1e-8);
    if (sp.indices[i] % 2 == 0) CHECK(std::abs(sp.values[i] - pi * sp.indices[i]) < 1e-8);
  }
}

TEST_CASE("model zeros against a brute-force scan") {
  CHECK(model_zeros_quarter(1.0, 4) == std::vector<double>{0.0, pi, 2 * pi, 3 * pi});
  for (double a1 : {0.3, 2.0, 5.0}) {
    const double A = a1 + 1 / a1, B = a1 - 1 / a1;
    const auto roots = scan_roots([&](double l) { return A * std::sin(l) + B * std::sin(l / 2); },
                                  1e-3, 25.0);
    const auto z = model_zeros_quarter(a1, 9);
    REQUIRE(roots.size() == 7);
    for (std::size_t i = 0; i < roots.size(); ++i) CHECK(std::abs(z[i + 1] - roots[i]) < 1e-10);
    for (int n = 0; n < 4; ++n) CHECK(z[2 * n] == doctest::Approx(2 * pi * n).epsilon(1e-15));
  }
}

TEST_CASE("general free model zeros match the forward solver") {
  const auto z = free_model_zeros(1.6, 0.3, 20);
  const Spectrum sp = eigenvalues(ProblemSpec::free(0.3, 1.6), 19);
  for (std::size_t i = 0; i < sp.size(); ++i) CHECK(std::abs(sp.values[i] - z[i + 1]) < 1e-8);
  const auto half = free_model_zeros(1.6, 0.5, 5);
  for (int n = 0; n < 5; ++n) CHECK(half[n] == doctest::Approx(n * pi).epsilon(1e-14));
}

TEST_CASE("constant potential shifts the free spectrum") {
  const double c = 2.0;
  ProblemSpec s = ProblemSpec::free(0.5, 1.0);
  s = shift_spectrum(s, c);
  const Spectrum sp = eigenvalues(s, 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(sp.indices[i] == i);
    CHECK(std::abs(sp.values[i] - std::sqrt(i * i * pi * pi + c)) < 1e-8);
  }
}

TEST_CASE("indexed eigenvalues and counting agree with the scan") {
  const ProblemSpec s = smooth_spec(0.5, 2.0, 0.5, 4);
  const Spectrum sp = eigenvalues(s, 30);
  for (std::size_t i = 0; i < sp.size(); i += 3) {
    const double e = eigenvalue_sq(s, sp.indices[i]);
    CHECK(std::abs(std::sqrt(e) - sp.values[i]) < 1e-9);
    CHECK(count_eigenvalues_below(s, sp.values[i] * sp.values[i] - 1e-3) == sp.indices[i]);
    CHECK(count_eigenvalues_below(s, sp.values[i] * sp.values[i] + 1e-3) == sp.indices[i] + 1);
  }
  // sign change across every reported root
  for (double lam : sp.values) {
    CHECK((char_delta(s, lam - 1e-6) < 0) != (char_delta(s, lam + 1e-6) < 0));
  }
}

TEST_CASE("negative eigenvalues are counted into the offset") {
  ProblemSpec s = shift_spectrum(ProblemSpec::free(0.5, 1.0), -30.0);
  // -30 + n^2 pi^2 < 0 for n = 0, 1
  const Spectrum sp = eigenvalues(s, 3);
  CHECK(sp.indices.front() == 2);
  CHECK(std::abs(sp.values[0] - std::sqrt(4 * pi * pi - 30.0)) < 1e-8);
  CHECK(eigenvalue_sq(s, 0) == doctest::Approx(-30.0).epsilon(1e-9));
  CHECK(eigenvalue_sq(s, 1) == doctest::Approx(pi * pi - 30.0).epsilon(1e-9));
}

TEST_CASE("root counts follow the free count for large Lambda") {
  const ProblemSpec s = smooth_spec(0.3, 0.7, -0.4, 8);
  const ProblemSpec f = ProblemSpec::free(0.3, 0.7);
  for (double lam : {50.0, 120.0}) {
    const long a = count_eigenvalues_below(s, lam * lam);
    const long b = count_eigenvalues_below(f, lam * lam);
    CHECK(std::abs(a - b) <= 1);
  }
}

TEST_CASE("d = 1/2 asymptotics: even and odd gamma subsequences settle") {
  const ProblemSpec s = smooth_spec(0.5, 2.0, 0.5, 5);
  const Spectrum sp = eigenvalues(s, 80);
  auto gamma = [&](std::size_t i) {
    const double n = static_cast<double>(sp.indices[i]);
    return (sp.values[i] - pi * n) * pi * n;
  };
  const std::size_t last = sp.size() - 1;
  CHECK(std::abs(gamma(last) - gamma(last - 18)) < 0.05);
  CHECK(std::abs(gamma(last - 1) - gamma(last - 19)) < 0.05);
}

TEST_CASE("spectrum file round trip") {
  const Spectrum sp = eigenvalues(smooth_spec(0.5, 1.3, 0.1, 2), 12);
  const Spectrum back = parse_spectrum(format_spectrum(sp));
  CHECK(back.indices == sp.indices);
  CHECK(back.values == sp.values);
  CHECK_THROWS_AS(parse_spectrum("1 2.0\n1 3.0\n"), Error);
  CHECK_THROWS_AS(parse_spectrum("1 2.0\n2 1.0\n"), Error);
  CHECK_THROWS_AS(parse_spectrum("1 abc\n"), Error);
}

TEST_CASE("spec validation") {
  ProblemSpec s = ProblemSpec::free(0.5, 1.0);
  s.a1 = -1.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s.a1 = 1.0;
  s.d = 0.4;
  CHECK_THROWS_AS(s.validate(), Error);
  CHECK_THROWS_AS(eigenvalues(ProblemSpec::free(0.5, 1.0), 0), Error);
}
