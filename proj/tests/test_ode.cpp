#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "sldisc/error.hpp"
#include "sldisc/ode.hpp"

using namespace sldisc;
using std::numbers::pi;

TEST_CASE("free equation closed form") {
  const Potential q = Potential::constant(0.5, 0.0);
  const PhiValue p = integrate_phi(q, 0.0, 3.0, 0.5);
  CHECK(p.phi == doctest::Approx(std::cos(1.5)).epsilon(1e-10));
  CHECK(p.dphi == doctest::Approx(-3.0 * std::sin(1.5)).epsilon(1e-10));
}

TEST_CASE("constant potential closed form, both integration modes") {
  const double c = 3.7;
  const Potential q = Potential::constant(0.5, c);
  for (double lam : {2.5, 10.0, 40.0, 150.0, 230.0}) {
    const double w = std::sqrt(lam * lam - c);
    const PhiValue p = integrate_phi(q, 0.0, lam, 0.5);
    CHECK(std::abs(p.phi - std::cos(0.5 * w)) < 2e-9);
    CHECK(std::abs(p.dphi + w * std::sin(0.5 * w)) < 2e-9 * w);
  }
}

TEST_CASE("q = x against a fine-step RK4 oracle") {
  const Potential q = Potential::sampled(0.5, [](double x) { return x; });
  const PhiValue p = integrate_phi(q, 1.0, 5.0, 0.5);
  const auto coarse = oracle::rk4(q, 25.0, 1.0, 1.0, 0.5, 1);
  const auto fine = oracle::rk4(q, 25.0, 1.0, 1.0, 0.5, 10);
  // the oracle is self-converged before it is used
  CHECK(std::abs(coarse.first - fine.first) < 1e-9);
  CHECK(std::abs(p.phi - fine.first) < 1e-9);
  CHECK(std::abs(p.dphi - fine.second) < 1e-8);
}

TEST_CASE("rough potential at large lambda against the oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(Potential::node_count(0.5));
  for (double& x : v) x = u(rng);
  const Potential q(0.5, v);
  for (double lam : {30.0, 120.0, 180.0}) {
    const PhiValue p = integrate_phi(q, -0.3, lam, 0.5);
    const auto ref = oracle::rk4(q, lam * lam, 1.0, -0.3, 0.5, 24);
    CHECK(std::abs(p.phi - ref.first) < 1e-8);
    CHECK(std::abs(p.dphi - ref.second) < 1e-8 * lam);
  }
}

TEST_CASE("omega") {
  CHECK(omega(Potential::constant(0.5, 0.0), 0.0) == 0.0);
  CHECK(omega(Potential::constant(0.5, 2.0), 1.0) == doctest::Approx(1.5).epsilon(1e-15));
  const Potential s = Potential::sampled(0.5, [](double x) { return std::sin(2 * pi * x); });
  // exact antiderivative: (1 - cos(pi)) / (2 pi) = 1 / pi
  CHECK(omega(s, 0.0) == doctest::Approx(0.5 / pi).epsilon(1e-6));
}

TEST_CASE("domain errors") {
  const Potential q = Potential::constant(0.5, 0.0);
  CHECK_THROWS_AS(integrate_phi(q, 0.0, 1.0, 0.6), Error);
  CHECK_THROWS_AS(integrate_phi(q, 0.0, 1.0, -0.1), Error);
  CHECK_THROWS_AS(integrate_phi(q, 0.0, NAN, 0.5), Error);
  CHECK_THROWS_AS(integrate_phi(q, 0.0, INFINITY, 0.5), Error);
}

TEST_CASE("evenness in lambda") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const double c1 = u(rng), c2 = u(rng), h = u(rng), lam = 60.0 * (u(rng) + 1.0);
    const Potential q = Potential::sampled(0.5, [&](double x) { return c1 + c2 * std::cos(5 * x); }, 512);
    const PhiValue a = integrate_phi(q, h, lam, 0.5);
    const PhiValue b = integrate_phi(q, h, -lam, 0.5);
    CHECK(a.phi == b.phi);
    CHECK(a.dphi == b.dphi);
  }
}

TEST_CASE("Wronskian of two solutions stays 1") {
  const Potential q = Potential::sampled(0.5, [](double x) { return 3.0 * std::sin(9.0 * x); });
  const double h = 0.7;
  for (double lam : {0.5, 4.0, 70.0, 160.0}) {
    for (double x : {0.1, 0.33, 0.5}) {
      const ShootResult f = shoot(q, lam * lam, 1.0, h, x);
      const ShootResult g = shoot(q, lam * lam, 0.0, 1.0, x);
      CHECK(std::abs(f.y * g.dy - f.dy * g.y - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("shift covariance") {
  const Potential q = Potential::sampled(0.5, [](double x) { return x * x - 0.2; });
  const double c = 2.5;
  for (double lam : {3.0, 25.0, 120.0}) {
    const PhiValue a = integrate_phi(q.shifted(c), 0.4, lam, 0.5);
    const PhiValue b = integrate_phi(q, 0.4, std::sqrt(lam * lam - c), 0.5);
    CHECK(std::abs(a.phi - b.phi) < 1e-8);
    CHECK(std::abs(a.dphi - b.dphi) < 1e-8 * lam);
  }
}

TEST_CASE("first-order asymptotics of phi") {
  const Potential q = Potential::sampled(0.5, [](double x) { return 1.0 + x; });
  const double h = 0.3;
  const double w = omega(q, h);
  double worst = 0.0;
  for (double lam = 20.0; lam < 400.0; lam += 17.3) {
    const PhiValue p = integrate_phi(q, h, lam, 0.5);
    const double r = p.phi - std::cos(0.5 * lam) - w * std::sin(0.5 * lam) / lam;
    worst = std::max(worst, std::abs(r) * lam);
  }
  CHECK(worst < 2.0);
}

TEST_CASE("zero count and norm for the free equation") {
  const Potential q = Potential::constant(0.5, 0.0);
  for (double lam : {1.0, 7.0, 40.0, 101.0, 333.0}) {
    std::vector<double> nodes;
    const ShootResult r = shoot_with_norm(q, lam * lam, 1.0, 0.0, 0.5, {}, &nodes);
    // zeros of cos(lam x) on (0, 1/2]
    const long expect = static_cast<long>(std::floor(0.5 * lam / pi + 0.5));
    CHECK(r.zeros == expect);
    const double norm = 0.25 + std::sin(lam) / (4.0 * lam);
    CHECK(std::abs(r.norm2 - norm) < 1e-9);
    REQUIRE(nodes.size() == q.nodes());
    CHECK(std::abs(nodes[300] - std::cos(lam * q.x(300))) < 1e-8);
  }
}

TEST_CASE("negative energy") {
  const Potential q = Potential::constant(0.5, 0.0);
  const ShootResult r = shoot(q, -16.0, 1.0, 0.0, 0.5);
  CHECK(r.y == doctest::Approx(std::cosh(2.0)).epsilon(1e-10));
  CHECK(r.dy == doctest::Approx(4.0 * std::sinh(2.0)).epsilon(1e-10));
  CHECK(r.zeros == 0);
}
