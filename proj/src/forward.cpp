#include "sldisc/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sldisc/error.hpp"
#include "text_format.hpp"

namespace sldisc {

namespace {

constexpr double pi = std::numbers::pi;

struct Shot {
  double y = 0.0;
  double dy = 0.0;
  long zeros = 0;
  double norm2 = 0.0;
};

// Solution of the full problem on [0, 1] with y(0) = 1, y'(0) = h1, passed
// through the jump at d. The second half runs on q2 mirrored back onto
// [d, 1].
template <bool WithNorm>
Shot shoot_full(const ProblemSpec& s, const Potential& q2_forward, double energy,
                const OdeOptions& opts) {
  ShootResult left, right;
  if constexpr (WithNorm) {
    left = shoot_with_norm(s.q1, energy, 1.0, s.h1, s.d, opts);
  } else {
    left = shoot(s.q1, energy, 1.0, s.h1, s.d, opts);
  }
  const double y0 = s.a1 * left.y;
  const double dy0 = left.dy / s.a1 + s.a2 * left.y;
  if constexpr (WithNorm) {
    right = shoot_with_norm(q2_forward, energy, y0, dy0, q2_forward.length(), opts);
  } else {
    right = shoot(q2_forward, energy, y0, dy0, q2_forward.length(), opts);
  }
  return {right.y, right.dy, left.zeros + right.zeros, left.norm2 + right.norm2};
}

double right_angle(double h2) { return std::atan2(1.0, -h2); }

long count_from_angle(double theta, double beta) {
  if (!(theta > beta)) return 0;
  return static_cast<long>(std::ceil((theta - beta) / pi));
}

}  // namespace

void ProblemSpec::validate() const {
  if (!(d > 0.0 && d <= 0.5)) throw_domain("d must satisfy 0 < d <= 1/2");
  if (!(a1 > 0.0) || !std::isfinite(a1)) throw_domain("a1 must be positive");
  if (!std::isfinite(a2) || !std::isfinite(h1) || !std::isfinite(h2)) {
    throw_domain("h1, h2 and a2 must be finite");
  }
  if (q1.empty() || q2.empty()) throw_domain("both potentials must be set");
  if (std::abs(q1.length() - d) > 1e-12) throw_domain("q1 must live on [0, d]");
  if (std::abs(q2.length() - (1.0 - d)) > 1e-12) throw_domain("q2 must live on [0, 1 - d]");
}

ProblemSpec ProblemSpec::free(double d, double a1, int nodes_per_unit) {
  ProblemSpec s;
  s.d = d;
  s.a1 = a1;
  s.q1 = Potential::constant(d, 0.0, nodes_per_unit);
  s.q2 = Potential::constant(1.0 - d, 0.0, nodes_per_unit);
  s.validate();
  return s;
}

void Spectrum::validate() const {
  if (indices.size() != values.size()) throw_domain("spectrum: index/value length mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw_domain("spectrum: values must be positive and finite");
    }
    if (indices[i] < 0) throw_domain("spectrum: negative index");
    if (i > 0 && !(values[i] > values[i - 1])) {
      throw_domain("spectrum: values must be strictly increasing");
    }
    if (i > 0 && !(indices[i] > indices[i - 1])) {
      throw_domain("spectrum: indices must be strictly increasing");
    }
  }
}

bool Spectrum::is_full() const {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] != static_cast<long>(i)) return false;
  }
  return true;
}

double char_delta(const ProblemSpec& spec, double lambda, const OdeOptions& opts) {
  const PhiValue p1 = integrate_phi(spec.q1, spec.h1, lambda, spec.d, opts);
  const PhiValue p2 = integrate_phi(spec.q2, spec.h2, lambda, 1.0 - spec.d, opts);
  return spec.a1 * p1.phi * p2.dphi + p1.dphi * p2.phi / spec.a1 + spec.a2 * p1.phi * p2.phi;
}

double char_delta_shooting(const ProblemSpec& spec, double lambda, const OdeOptions& opts) {
  if (!std::isfinite(lambda)) throw_domain("lambda must be finite");
  const Shot s = shoot_full<false>(spec, spec.q2.reversed(), lambda * lambda, opts);
  return s.dy + spec.h2 * s.y;
}

long count_eigenvalues_below(const ProblemSpec& spec, double energy, const OdeOptions& opts) {
  const Shot s = shoot_full<false>(spec, spec.q2.reversed(), energy, opts);
  return count_from_angle(prufer_angle(s.y, s.dy, s.zeros), right_angle(spec.h2));
}

double eigenvalue_sq(const ProblemSpec& spec, long n, const OdeOptions& opts) {
  if (n < 0) throw_domain("eigenvalue index must be nonnegative");
  const Potential q2f = spec.q2.reversed();
  const double target = right_angle(spec.h2) + static_cast<double>(n) * pi;
  auto angle = [&](double e, double& slope) {
    const Shot s = shoot_full<true>(spec, q2f, e, opts);
    const double r2 = s.y * s.y + s.dy * s.dy;
    slope = s.norm2 / r2;
    return prufer_angle(s.y, s.dy, s.zeros);
  };
  const double guess = std::pow((static_cast<double>(n) + 0.5) * pi, 2);
  return detail::solve_angle(angle, target, guess);
}

Spectrum eigenvalues(const ProblemSpec& spec, int N, const EigenOptions& opts) {
  if (N < 1) throw_domain("number of eigenvalues must be at least 1");
  spec.validate();
  const Potential q2f = spec.q2.reversed();
  const double beta = right_angle(spec.h2);

  struct Sample {
    double lam;
    long count;
  };
  auto sample = [&](double lam) {
    const Shot s = shoot_full<false>(spec, q2f, lam * lam, opts.ode);
    return Sample{lam, count_from_angle(prufer_angle(s.y, s.dy, s.zeros), beta)};
  };
  auto delta = [&](double lam) { return char_delta(spec, lam, opts.ode); };

  Spectrum out;
  auto refine = [&](double lo, double hi, double flo, long index) {
    while (hi - lo > opts.bisection_width) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fm = delta(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    double root = 0.5 * (lo + hi);
    const double f0 = delta(root);
    const double hstep = opts.newton_step;
    const double slope = (delta(root + hstep) - delta(root - hstep)) / (2.0 * hstep);
    if (slope != 0.0 && std::isfinite(slope)) {
      const double polished = root - f0 / slope;
      if (std::abs(polished - root) <= 4.0 * opts.bisection_width &&
          std::abs(delta(polished)) <= std::abs(f0)) {
        root = polished;
      }
    }
    out.indices.push_back(index);
    out.values.push_back(root);
  };

  // Recursively split [a, b] until each piece holds one sign change that the
  // eigenvalue count confirms.
  auto process = [&](auto&& self, Sample a, Sample b, int depth) -> void {
    const long k = b.count - a.count;
    if (k <= 0) return;
    if (k == 1) {
      const double fa = delta(a.lam);
      const double fb = delta(b.lam);
      if (fa == 0.0) {
        out.indices.push_back(a.count);
        out.values.push_back(a.lam);
        return;
      }
      if ((fa < 0.0) != (fb < 0.0) || fb == 0.0) {
        refine(a.lam, b.lam, fa, a.count);
        return;
      }
    }
    if (depth >= opts.max_refinement_depth) {
      throw_domain("root localization failed at index " + std::to_string(a.count));
    }
    constexpr int parts = 4;
    Sample prev = a;
    for (int i = 1; i <= parts; ++i) {
      const Sample next = i == parts ? b : sample(a.lam + (b.lam - a.lam) * i / parts);
      self(self, prev, next, depth + 1);
      prev = next;
    }
  };

  const double step = std::min(pi / 8.0, pi * spec.d / 4.0);
  Sample lo = sample(opts.lambda_min);
  const long offset = lo.count;
  const double lam_limit = 8.0 * pi * static_cast<double>(offset + N + 16);
  while (static_cast<long>(out.size()) < N) {
    const Sample hi = sample(lo.lam + step);
    process(process, lo, hi, 0);
    lo = hi;
    if (lo.lam > lam_limit) {
      throw_domain("root localization failed at index " + std::to_string(offset + out.size()));
    }
  }
  out.indices.resize(static_cast<std::size_t>(N));
  out.values.resize(static_cast<std::size_t>(N));
  return out;
}

std::vector<double> model_zeros_quarter(double a1, int N) {
  if (!(a1 > 0.0)) throw_domain("a1 must be positive");
  if (N < 1) throw_domain("N must be at least 1");
  // sin(l) = 2 sin(l/2) cos(l/2), so the zeros are l = 2 pi k together with
  // cos(l/2) = -(a1 - 1/a1) / (2 (a1 + 1/a1)).
  const double A = a1 + 1.0 / a1;
  const double B = a1 - 1.0 / a1;
  const double alpha = std::acos(-B / (2.0 * A));
  std::vector<double> z(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) {
    const double base = 4.0 * pi * (n / 4);
    switch (n % 4) {
      case 0: z[n] = base; break;
      case 1: z[n] = base + 2.0 * alpha; break;
      case 2: z[n] = base + 2.0 * pi; break;
      default: z[n] = base + 4.0 * pi - 2.0 * alpha; break;
    }
  }
  return z;
}

std::vector<double> free_model_zeros(double a1, double d, int N) {
  if (!(a1 > 0.0)) throw_domain("a1 must be positive");
  if (!(d > 0.0 && d <= 0.5)) throw_domain("d must satisfy 0 < d <= 1/2");
  if (N < 1) throw_domain("N must be at least 1");
  if (d == 0.25) return model_zeros_quarter(a1, N);
  const double A = a1 + 1.0 / a1;
  const double B = a1 - 1.0 / a1;
  const double w = 1.0 - 2.0 * d;
  auto g = [&](double l) { return A * std::sin(l) + B * std::sin(w * l); };
  std::vector<double> z{0.0};
  // |B| < A keeps the zeros of g simple and at least ~pi/(1 + w) apart.
  const double step = pi / 64.0;
  double lo = 1e-9, glo = g(lo);
  while (static_cast<int>(z.size()) < N) {
    const double hi = lo + step;
    const double ghi = g(hi);
    if (ghi == 0.0) {
      z.push_back(hi);
    } else if ((glo < 0.0) != (ghi < 0.0)) {
      double a = lo, b = hi, fa = glo;
      for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = g(m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      z.push_back(0.5 * (a + b));
    }
    lo = hi;
    glo = ghi;
  }
  return z;
}

ProblemSpec shift_spectrum(const ProblemSpec& spec, double c) {
  ProblemSpec out = spec;
  out.q1 = spec.q1.shifted(c);
  out.q2 = spec.q2.shifted(c);
  return out;
}

std::string format_spectrum(const Spectrum& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += std::to_string(s.indices[i]);
    out += ' ';
    out += detail::fmt17(s.values[i]);
    out += '\n';
  }
  return out;
}

Spectrum parse_spectrum(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Spectrum s;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream ls{std::string(t)};
    std::string ns, vs, extra;
    ls >> ns >> vs >> extra;
    const auto n = detail::parse_int(ns);
    const auto v = detail::parse_real(vs);
    if (!n || !v || !extra.empty()) {
      throw_config("spectrum file line " + std::to_string(lineno) + ": expected 'n lambda_n'");
    }
    if (!s.indices.empty() && *n <= s.indices.back()) {
      throw_config("spectrum file line " + std::to_string(lineno) + ": indices must increase");
    }
    s.indices.push_back(*n);
    s.values.push_back(*v);
  }
  try {
    s.validate();
  } catch (const Error& e) {
    throw_config(std::string("spectrum file: ") + e.what());
  }
  return s;
}

void write_spectrum(const Spectrum& s, const std::string& path) {
  detail::write_file(path, format_spectrum(s));
}

Spectrum read_spectrum(const std::string& path) { return parse_spectrum(detail::read_file(path)); }

}  // namespace sldisc
