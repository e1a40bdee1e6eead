#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "sldisc/error.hpp"
#include "sldisc/potential.hpp"

using namespace sldisc;

TEST_CASE("potential grid and interpolation") {
  const Potential q = Potential::sampled(0.5, [](double x) { return 2.0 * x; }, 64);
  CHECK(q.nodes() == 33);
  CHECK(q.x(q.nodes() - 1) == 0.5);
  CHECK(q(0.3) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(q.integral() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(q(0.51), Error);
  CHECK_THROWS_AS(Potential(0.5, {1.0}), Error);
  CHECK_THROWS_AS(Potential(0.5, {1.0, NAN}), Error);
}

TEST_CASE("l2 norm is exact for the interpolant") {
  // q = x on [0, 1]: integral of x^2 is 1/3.
  const Potential q = Potential::sampled(1.0, [](double x) { return x; }, 16);
  CHECK(q.l2_norm() == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-14));
  const Potential z = Potential::constant(1.0, 0.0, 16);
  CHECK(q.l2_distance(z) == doctest::Approx(q.l2_norm()).epsilon(1e-14));
  CHECK_THROWS_AS(q.l2_distance(Potential::constant(1.0, 0.0, 32)), Error);
}

TEST_CASE("cosine series matches direct sampling") {
  const std::vector<double> c{0.1, -0.4, 0.25};
  const Potential a = Potential::cosine_series(0.5, c, 256);
  const Potential b = Potential::sampled(
      0.5,
      [&](double x) {
        double s = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * std::cos(k * std::numbers::pi * x / 0.5);
        return s;
      },
      256);
  for (std::size_t i = 0; i < a.nodes(); ++i) CHECK(a.value(i) == doctest::Approx(b.value(i)).epsilon(1e-13));
}

TEST_CASE("reverse and shift") {
  const Potential q = Potential::sampled(0.5, [](double x) { return x * x; }, 64);
  const Potential r = q.reversed();
  CHECK(r(0.0) == q(0.5));
  CHECK(r.reversed() == q);
  CHECK(q.shifted(1.5).integral() == doctest::Approx(q.integral() + 0.75).epsilon(1e-14));
}

TEST_CASE("potential file round trip is exact") {
  const Potential q = Potential::sampled(0.5, [](double x) { return std::sin(7.3 * x) / 3.0; }, 128);
  const Potential back = parse_potential(format_potential(q));
  CHECK(back == q);
}

TEST_CASE("potential parser rejects malformed input") {
  CHECK_THROWS_AS(parse_potential(""), Error);
  CHECK_THROWS_AS(parse_potential("length=1 nodes=3\n0 1\n0.5 1\n"), Error);
  CHECK_THROWS_AS(parse_potential("length=1 nodes=3\n0 1\n0.6 1\n1 1\n"), Error);
  CHECK_THROWS_AS(parse_potential("length=1 nodes=3\n0 1\n0.5 x\n1 1\n"), Error);
  CHECK_THROWS_AS(parse_potential("len=1 nodes=3\n"), Error);
  try {
    parse_potential("length=1 nodes=3\n0 1\n0.5 x\n1 1\n");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}
