#include "sldisc/main_equation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "sldisc/error.hpp"
#include "text_format.hpp"

namespace sldisc {

namespace {

constexpr double pi = std::numbers::pi;

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// (sin t - t cos t) / t^2
double sinc1(double t) {
  if (std::abs(t) < 1e-2) {
    const double t2 = t * t;
    return t * (1.0 / 3.0 - t2 * (1.0 / 30.0 - t2 / 840.0));
  }
  return (std::sin(t) - t * std::cos(t)) / (t * t);
}

Eigen::MatrixXd to_matrix(const std::vector<double>& g, std::size_t N) {
  Eigen::MatrixXd m(N, N);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) m(i, j) = g[i * N + j];
  }
  return m;
}

Eigen::MatrixXd normalized(const Eigen::MatrixXd& g) {
  const Eigen::VectorXd s = g.diagonal().cwiseSqrt().cwiseInverse();
  return s.asDiagonal() * g * s.asDiagonal();
}

double condition_of(const Eigen::MatrixXd& gn) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gn, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (!(ev(0) > 0.0)) return std::numeric_limits<double>::infinity();
  return ev(ev.size() - 1) / ev(0);
}

}  // namespace

KernelPair KernelPair::from_terms(double d, std::vector<TrigTerm> terms, int nodes_per_unit) {
  KernelPair K;
  K.d = d;
  const std::size_t n = Potential::node_count(d, nodes_per_unit);
  std::vector<double> k1(n, 0.0), k2(n, 0.0);
  const double h = d / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i + 1 == n ? d : static_cast<double>(i) * h;
    double s1 = 0.0, s2 = 0.0;
    for (const TrigTerm& t : terms) {
      s1 += t.s * std::sin(t.lambda * x);
      s2 += t.c * std::cos(t.lambda * x);
    }
    k1[i] = s1;
    k2[i] = s2;
  }
  K.K1 = Potential(d, std::move(k1));
  K.K2 = Potential(d, std::move(k2));
  K.expansion = std::move(terms);
  return K;
}

KernelPair KernelPair::zero(double d, int nodes_per_unit) {
  KernelPair K;
  K.d = d;
  K.K1 = Potential::constant(d, 0.0, nodes_per_unit);
  K.K2 = Potential::constant(d, 0.0, nodes_per_unit);
  return K;
}

BasisElement build_vn(const Potential& q2, double h2, double a1, double a2, double d,
                      double lambda, long n, const OdeOptions& opts) {
  if (!(lambda > 0.0)) throw_domain("basis frequency must be positive");
  if (!(a1 > 0.0)) throw_domain("a1 must be positive");
  const PhiValue p = integrate_phi(q2, h2, lambda, 1.0 - d, opts);
  return {n, lambda, (a1 * p.dphi + a2 * p.phi) / lambda, p.phi / a1};
}

MainEqRHS build_fn(const BasisElement& v, double d, double omega1) {
  const double l = v.lambda;
  const double c = std::cos(l * d), s = std::sin(l * d);
  return {v.n, -v.c_sin * (l * c + omega1 * s) - v.c_cos * (-l * s + omega1 * c)};
}

MainEqRHS build_fn(const Potential& q2, double h2, double a1, double a2, double d, double omega1,
                   double lambda, long n, const OdeOptions& opts) {
  return build_fn(build_vn(q2, h2, a1, a2, d, lambda, n, opts), d, omega1);
}

BasisElement model_vn(double a1, double d, double lambda, long n) {
  if (!(lambda >= 0.0)) throw_domain("model frequency must be nonnegative");
  const double d2 = 1.0 - d;
  // phi2 = cos(lambda d2), phi2' = -lambda sin(lambda d2)
  return {n, lambda, -a1 * std::sin(lambda * d2), std::cos(lambda * d2) / a1};
}

double sin_sin(double a, double b, double d) {
  return 0.5 * d * (sinc((a - b) * d) - sinc((a + b) * d));
}

double cos_cos(double a, double b, double d) {
  return 0.5 * d * (sinc((a - b) * d) + sinc((a + b) * d));
}

double inner_product(const BasisElement& u, const BasisElement& v, double d) {
  return u.c_sin * v.c_sin * sin_sin(u.lambda, v.lambda, d) +
         u.c_cos * v.c_cos * cos_cos(u.lambda, v.lambda, d);
}

double inner_product(const KernelPair& K, const BasisElement& v) {
  const Psi p = psi_from_K(K, v.lambda);
  return v.c_sin * p.psi1 + v.c_cos * p.psi2;
}

Psi trig_moments(const Potential& f, double lambda) {
  // Per cell: f = fbar + g t about the midpoint m, so
  // int e^{i lambda x} f = e^{i lambda m} h [fbar sinc(th) + i (df/2) sinc1(th)].
  const double l = std::abs(lambda);
  const auto v = f.values();
  const double h = f.spacing();
  const double th = 0.5 * l * h;
  const double s0 = sinc(th), s1 = sinc1(th);
  double sc = 0.0, ss = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double m = 0.5 * (f.x(i) + f.x(i + 1));
    const double A = 0.5 * (v[i] + v[i + 1]) * s0;
    const double B = 0.5 * (v[i + 1] - v[i]) * s1;
    const double c = std::cos(l * m), s = std::sin(l * m);
    sc += c * A - s * B;
    ss += s * A + c * B;
  }
  return {lambda < 0.0 ? -ss * h : ss * h, sc * h};
}

Psi psi_from_K(const KernelPair& K, double lambda) {
  if (!K.has_expansion()) {
    Psi p1 = trig_moments(K.K1, lambda);
    Psi p2 = trig_moments(K.K2, lambda);
    return {p1.psi1, p2.psi2};
  }
  const double l = std::abs(lambda);
  double s1 = 0.0, s2 = 0.0;
  for (const TrigTerm& t : K.expansion) {
    s1 += t.s * sin_sin(t.lambda, l, K.d);
    s2 += t.c * cos_cos(t.lambda, l, K.d);
  }
  return {lambda < 0.0 ? -s1 : s1, s2};
}

double psi1_slope_at_zero(const KernelPair& K) {
  if (K.has_expansion()) {
    // int_0^d x sin(w x) dx = (sin(w d) - w d cos(w d)) / w^2
    double s = 0.0;
    const double d = K.d;
    for (const TrigTerm& t : K.expansion) {
      s += t.s * d * d * sinc1(t.lambda * d);
    }
    return s;
  }
  // exact for the piecewise-linear interpolant
  const auto v = K.K1.values();
  const double h = K.K1.spacing();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double x0 = K.K1.x(i), x1 = K.K1.x(i + 1);
    s += h * (v[i] * (2.0 * x0 + x1) + v[i + 1] * (x0 + 2.0 * x1)) / 6.0;
  }
  return s;
}

std::vector<double> gram_matrix(const std::vector<BasisElement>& basis, double d) {
  const std::size_t N = basis.size();
  std::vector<double> g(N * N);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i; j < N; ++j) {
      g[i * N + j] = g[j * N + i] = inner_product(basis[i], basis[j], d);
    }
  }
  return g;
}

double normalized_condition(const std::vector<double>& gram, std::size_t N) {
  if (N == 0) return 1.0;
  return condition_of(normalized(to_matrix(gram, N)));
}

KernelSolution solve_K(const std::vector<BasisElement>& basis, const std::vector<MainEqRHS>& rhs,
                       std::size_t N, double d, const SolveOptions& opts) {
  if (N == 0 || N > basis.size() || N > rhs.size()) {
    throw_domain("truncation exceeds the available basis or right-hand side");
  }
  if (!(d > 0.0 && d <= 0.5)) throw_domain("d must satisfy 0 < d <= 1/2");
  for (std::size_t i = 0; i < N; ++i) {
    if (basis[i].n != rhs[i].n) throw_domain("basis and right-hand side indices differ");
    if (!std::isfinite(rhs[i].f) || !std::isfinite(basis[i].c_sin) ||
        !std::isfinite(basis[i].c_cos)) {
      throw_domain("non-finite basis element or right-hand side");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(basis[i].lambda - basis[j].lambda) < opts.min_gap) {
        throw_domain("near-coincident frequencies at indices " + std::to_string(basis[j].n) +
                     " and " + std::to_string(basis[i].n) + ": spectrum not simple");
      }
    }
  }
  const std::vector<BasisElement> used(basis.begin(), basis.begin() + static_cast<long>(N));
  const std::vector<double> g = gram_matrix(used, d);
  const Eigen::MatrixXd G = to_matrix(g, N);
  for (std::size_t i = 0; i < N; ++i) {
    if (!(G(i, i) > 0.0)) {
      throw_domain("basis degenerate: not a Riesz frame at this truncation (zero element " +
                   std::to_string(basis[i].n) + ")");
    }
  }
  const Eigen::VectorXd scale = G.diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd Gn = scale.asDiagonal() * G * scale.asDiagonal();
  const double cond = condition_of(Gn);
  if (!(cond <= opts.max_condition)) {
    throw_domain("basis degenerate: not a Riesz frame at this truncation (condition " +
                 detail::fmt17(cond) + ")");
  }
  Eigen::VectorXd f(N);
  for (std::size_t i = 0; i < N; ++i) f(i) = rhs[i].f;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(Gn);
  Eigen::VectorXd y = ldlt.solve(scale.asDiagonal() * f);
  // one step of iterative refinement against the unscaled system
  Eigen::VectorXd c = scale.asDiagonal() * y;
  const Eigen::VectorXd r = f - G * c;
  c += scale.asDiagonal() * ldlt.solve(scale.asDiagonal() * r);

  KernelSolution out;
  out.coeffs.assign(c.data(), c.data() + N);
  out.gram_condition = cond;
  std::vector<TrigTerm> terms(N);
  for (std::size_t m = 0; m < N; ++m) {
    terms[m] = {used[m].lambda, c(m) * used[m].c_sin, c(m) * used[m].c_cos};
  }
  out.K = KernelPair::from_terms(d, std::move(terms), opts.nodes_per_unit);
  // residual through the expansion, independent of the linear algebra
  for (std::size_t n = 0; n < N; ++n) {
    const double res = std::abs(inner_product(out.K, used[n]) - rhs[n].f);
    out.max_residual = std::max(out.max_residual, res);
  }
  return out;
}

BasisDiagnostics basis_diagnostics(const std::vector<BasisElement>& basis, double a1, double d) {
  if (basis.size() < 8) throw_domain("basis diagnostics need at least 8 elements");
  long max_n = 0;
  for (const BasisElement& v : basis) max_n = std::max(max_n, v.n);
  const std::vector<double> zeros = free_model_zeros(a1, d, static_cast<int>(max_n) + 1);
  BasisDiagnostics out;
  double sum = 0.0;
  for (const BasisElement& v : basis) {
    const BasisElement w = model_vn(a1, d, zeros[static_cast<std::size_t>(v.n)], v.n);
    const double dist2 = inner_product(v, v, d) - 2.0 * inner_product(v, w, d) +
                         inner_product(w, w, d);
    sum += std::max(dist2, 0.0);
    out.partial_sums.push_back(sum);
  }
  out.closeness = sum;
  out.gram_condition = normalized_condition(gram_matrix(basis, d), basis.size());
  return out;
}

CompletenessReport completeness_heuristic(const std::vector<long>& indices, double d,
                                          const std::vector<double>& lambdas,
                                          const std::vector<BasisElement>* basis) {
  if (indices.size() != lambdas.size()) throw_domain("index and value lists differ in length");
  if (lambdas.empty()) throw_domain("completeness check needs at least one value");
  CompletenessReport r;
  const double big = *std::max_element(lambdas.begin(), lambdas.end());
  long count = 0;
  for (double l : lambdas) count += (l > 0.0 && l <= big) ? 1 : 0;
  r.density = static_cast<double>(count) / big;
  r.threshold = 2.0 * d / pi;
  r.pass = r.density >= 0.9 * r.threshold;
  r.gram_condition = basis ? normalized_condition(gram_matrix(*basis, d), basis->size())
                           : std::numeric_limits<double>::quiet_NaN();
  return r;
}

double kernel_distance(const KernelPair& a, const KernelPair& b) {
  const double e1 = a.K1.l2_distance(b.K1);
  const double e2 = a.K2.l2_distance(b.K2);
  return std::sqrt(e1 * e1 + e2 * e2);
}

std::string format_terms(const std::vector<TrigTerm>& terms) {
  std::string out;
  for (const TrigTerm& t : terms) {
    out += detail::fmt17(t.lambda) + ' ' + detail::fmt17(t.s) + ' ' + detail::fmt17(t.c) + '\n';
  }
  return out;
}

std::vector<TrigTerm> parse_terms(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<TrigTerm> out;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    std::istringstream ls{std::string(t)};
    std::string a, b, c, extra;
    ls >> a >> b >> c >> extra;
    const auto l = detail::parse_real(a), s = detail::parse_real(b), k = detail::parse_real(c);
    if (!l || !s || !k || !extra.empty()) {
      throw_config("kernel terms line " + std::to_string(lineno) + ": expected 'lambda s c'");
    }
    out.push_back({*l, *s, *k});
  }
  return out;
}

void write_kernel(const KernelPair& K, const std::string& dir, const std::string& stem) {
  const std::string base = dir + "/" + stem;
  write_potential(K.K1, base + "_K1.txt");
  write_potential(K.K2, base + "_K2.txt");
  if (K.has_expansion()) detail::write_file(base + "_terms.txt", format_terms(K.expansion));
}

KernelPair read_kernel(const std::string& dir, const std::string& stem) {
  const std::string base = dir + "/" + stem;
  KernelPair K;
  K.K1 = read_potential(base + "_K1.txt");
  K.K2 = read_potential(base + "_K2.txt");
  if (!K.K1.same_grid(K.K2)) throw_config("kernel files do not share a header");
  K.d = K.K1.length();
  std::ifstream probe(base + "_terms.txt");
  if (probe) K.expansion = parse_terms(detail::read_file(base + "_terms.txt"));
  return K;
}

}  // namespace sldisc
