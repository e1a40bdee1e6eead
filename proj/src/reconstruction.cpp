#include "sldisc/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>

#include "sldisc/error.hpp"
#include "text_format.hpp"

namespace sldisc {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kMinHalf = 1e-3;  // bottom of both half-spectrum routes

template <class F>
double refine_root(F&& f, double a, double b, double fa, double fb, double tol) {
  std::uintmax_t iters = 200;
  auto stop = [tol](double x, double y) { return std::abs(y - x) <= tol; };
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, stop, iters);
  return 0.5 * (r.first + r.second);
}

double end_angle(EndCondition end) { return end == EndCondition::dirichlet ? pi : 0.5 * pi; }

double signed_sqrt(double e) { return e >= 0.0 ? std::sqrt(e) : -std::sqrt(-e); }

struct HalfEigen {
  double energy = 0.0;
  std::vector<double> nodes;  // y at the grid nodes, y(0) = 1
};

HalfEigen solve_half(const Potential& q, double h, EndCondition end, long n, double guess,
                     const OdeOptions& opts, bool want_nodes) {
  const double target = end_angle(end) + static_cast<double>(n) * pi;
  const double d = q.length();
  auto angle = [&](double e, double& slope) {
    const ShootResult r = shoot_with_norm(q, e, 1.0, h, d, opts);
    slope = r.norm2 / (r.y * r.y + r.dy * r.dy);
    return prufer_angle(r.y, r.dy, r.zeros);
  };
  HalfEigen out;
  out.energy = detail::solve_angle(angle, target, guess);
  if (want_nodes) shoot_with_norm(q, out.energy, 1.0, h, d, opts, &out.nodes);
  return out;
}

double default_guess(EndCondition end, long n, double d) {
  const double k = static_cast<double>(n) + (end == EndCondition::dirichlet ? 0.5 : 0.0);
  const double l = std::max(k * pi / d, 1.0);
  return l * l;
}

// Composite Simpson weights on the nodes when the cell count is even,
// trapezoid otherwise.
std::vector<double> node_weights(const Potential& q) {
  const std::size_t n = q.nodes();
  const double h = q.spacing();
  std::vector<double> w(n, h);
  if ((n - 1) % 2 == 0) {
    for (std::size_t i = 0; i < n; ++i) w[i] = (i % 2 ? 4.0 : 2.0) * h / 3.0;
    w.front() = w.back() = h / 3.0;
  } else {
    w.front() = w.back() = 0.5 * h;
  }
  return w;
}

struct Target {
  EndCondition end;
  long n;
  double value;
};

void check_labels(const Spectrum& s, const char* name) {
  if (s.indices.size() != s.values.size()) throw_domain(std::string(name) + ": size mismatch");
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s.indices[i] > s.indices[i - 1]) || !(s.values[i] > s.values[i - 1])) {
      throw_domain(std::string(name) + " spectrum must be strictly increasing");
    }
  }
}

}  // namespace

Eta eval_eta(const KernelPair& K, double omega1, double lambda) {
  const double l = std::abs(lambda);
  const double d = K.d;
  const Psi p = psi_from_K(K, l);
  Eta e;
  if (l < 1e-8) {
    e.eta1 = 1.0 + omega1 * d + psi1_slope_at_zero(K);
  } else {
    e.eta1 = std::cos(l * d) + (omega1 * std::sin(l * d) + p.psi1) / l;
  }
  e.eta2 = -l * std::sin(l * d) + omega1 * std::cos(l * d) + p.psi2;
  return e;
}

Spectrum zeros_eta(const KernelPair& K, double omega1, int which, int N, const ZeroOptions& opts) {
  if (which != 1 && which != 2) throw_domain("eta selector must be 1 or 2");
  if (N < 1) throw_domain("number of zeros must be at least 1");
  const double d = K.d;
  const double shift = which == 1 ? 0.5 : 0.0;
  auto f = [&](double l) {
    const Eta e = eval_eta(K, omega1, l);
    return which == 1 ? e.eta1 : e.eta2;
  };

  for (int pass = 0; pass < 2; ++pass) {
    const double step = pi / (16.0 * d) / (pass == 0 ? 1.0 : 8.0);
    std::vector<double> z;
    double lo = opts.lambda_min, flo = f(lo);
    const double limit = (static_cast<double>(N) + 8.0) * 2.0 * pi / d;
    while (static_cast<int>(z.size()) < N && lo < limit) {
      const double hi = lo + step;
      const double fhi = f(hi);
      if (fhi == 0.0) {
        z.push_back(hi);
      } else if ((flo < 0.0) != (fhi < 0.0) && flo != 0.0) {
        z.push_back(refine_root(f, lo, hi, flo, fhi, opts.tolerance));
      }
      lo = hi;
      flo = fhi;
    }
    if (static_cast<int>(z.size()) < N) {
      throw_domain("zero localization failed at index " + std::to_string(z.size()));
    }
    const long count = static_cast<long>(z.size());
    const long offset = std::lround(z.back() * d / pi - shift) - (count - 1);
    bool ok = offset >= 0;
    long bad = offset;
    for (long i = count / 2; ok && i < count; ++i) {
      const double label = z[static_cast<std::size_t>(i)] * d / pi - shift;
      if (std::abs(label - static_cast<double>(offset + i)) >= 0.5) {
        ok = false;
        bad = offset + i;
      }
    }
    if (ok) {
      Spectrum s;
      for (long i = 0; i < count; ++i) {
        s.indices.push_back(offset + i);
        s.values.push_back(z[static_cast<std::size_t>(i)]);
      }
      return s;
    }
    if (pass == 1) throw_domain("zero localization failed at index " + std::to_string(bad));
  }
  throw_domain("zero localization failed");
}

double weyl(const KernelPair& K, double omega1, double lambda) {
  const Eta e = eval_eta(K, omega1, lambda);
  if (std::abs(e.eta1) <= 1e-13 * std::max(1.0, std::abs(e.eta2))) {
    throw_domain("pole of the Weyl function");
  }
  return e.eta2 / e.eta1;
}

long interlacing_violations(const TwoSpectra& s) {
  std::map<long, double> mu, nu;
  for (std::size_t i = 0; i < s.mu.size(); ++i) mu[s.mu.indices[i]] = s.mu.values[i];
  for (std::size_t i = 0; i < s.nu.size(); ++i) nu[s.nu.indices[i]] = s.nu.values[i];
  long bad = 0;
  for (const auto& [n, m] : mu) {
    const auto a = nu.find(n);
    const auto b = nu.find(n + 1);
    if (a != nu.end() && !(a->second < m)) ++bad;
    if (b != nu.end() && !(m < b->second)) ++bad;
  }
  return bad;
}

double half_eigenvalue_sq(const Potential& q, double h, EndCondition end, long n,
                          const OdeOptions& opts) {
  if (n < 0) throw_domain("eigenvalue index must be nonnegative");
  return solve_half(q, h, end, n, default_guess(end, n, q.length()), opts, false).energy;
}

TwoSpectra half_spectra(const Potential& q, double h, int N, const OdeOptions& opts) {
  TwoSpectra s;
  s.d = q.length();
  for (long n = 0; n < N; ++n) {
    const double em = half_eigenvalue_sq(q, h, EndCondition::dirichlet, n, opts);
    const double en = half_eigenvalue_sq(q, h, EndCondition::neumann, n, opts);
    if (em > kMinHalf * kMinHalf) {
      s.mu.indices.push_back(n);
      s.mu.values.push_back(std::sqrt(em));
    }
    if (en > kMinHalf * kMinHalf) {
      s.nu.indices.push_back(n);
      s.nu.values.push_back(std::sqrt(en));
    }
  }
  return s;
}

TwoSpectra half_spectra_scan(const Potential& q, double h, int N, const OdeOptions& opts) {
  const double d = q.length();
  TwoSpectra out;
  out.d = d;
  const double lmin = kMinHalf;
  const ShootResult bottom = shoot(q, lmin * lmin, 1.0, h, d, opts);
  const double theta = prufer_angle(bottom.y, bottom.dy, bottom.zeros);
  for (EndCondition end : {EndCondition::dirichlet, EndCondition::neumann}) {
    const double beta = end_angle(end);
    long label = theta > beta ? static_cast<long>(std::ceil((theta - beta) / pi)) : 0;
    auto f = [&](double l) {
      const PhiValue p = integrate_phi(q, h, l, d, opts);
      return end == EndCondition::dirichlet ? p.phi : p.dphi;
    };
    Spectrum& s = end == EndCondition::dirichlet ? out.mu : out.nu;
    const double step = pi / (32.0 * d);
    double lo = lmin, flo = f(lo);
    while (label < N) {
      const double hi = lo + step;
      const double fhi = f(hi);
      if ((flo < 0.0) != (fhi < 0.0)) {
        s.indices.push_back(label++);
        s.values.push_back(refine_root(f, lo, hi, flo, fhi, 1e-12));
      }
      lo = hi;
      flo = fhi;
      if (lo > (static_cast<double>(N) + 8.0) * 2.0 * pi / d) {
        throw_domain("zero localization failed at index " + std::to_string(label));
      }
    }
  }
  return out;
}

std::string format_two_spectra(const TwoSpectra& s) {
  std::map<long, std::pair<std::string, std::string>> rows;
  for (std::size_t i = 0; i < s.mu.size(); ++i) rows[s.mu.indices[i]].first = detail::fmt17(s.mu.values[i]);
  for (std::size_t i = 0; i < s.nu.size(); ++i) rows[s.nu.indices[i]].second = detail::fmt17(s.nu.values[i]);
  std::string out;
  for (const auto& [n, r] : rows) {
    out += std::to_string(n) + ' ' + (r.first.empty() ? "-" : r.first) + ' ' +
           (r.second.empty() ? "-" : r.second) + '\n';
  }
  return out;
}

TwoSpectra parse_two_spectra(const std::string& text, double d) {
  std::istringstream in(text);
  std::string line;
  TwoSpectra s;
  s.d = d;
  int lineno = 0;
  long prev = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream ls{std::string(t)};
    std::string a, b, c, extra;
    ls >> a >> b >> c >> extra;
    const auto n = detail::parse_int(a);
    const auto mu = b == "-" ? std::optional<double>() : detail::parse_real(b);
    const auto nu = c == "-" ? std::optional<double>() : detail::parse_real(c);
    if (!n || (b != "-" && !mu) || (c != "-" && !nu) || c.empty() || !extra.empty() ||
        *n <= prev) {
      throw_config("two-spectra file line " + std::to_string(lineno) +
                   ": expected increasing 'n mu_n nu_n'");
    }
    prev = *n;
    if (mu) {
      s.mu.indices.push_back(*n);
      s.mu.values.push_back(*mu);
    }
    if (nu) {
      s.nu.indices.push_back(*n);
      s.nu.values.push_back(*nu);
    }
  }
  return s;
}

void write_two_spectra(const TwoSpectra& s, const std::string& path) {
  detail::write_file(path, format_two_spectra(s));
}

TwoSpectra read_two_spectra(const std::string& path, double d) {
  return parse_two_spectra(detail::read_file(path), d);
}

BorgResult recover_q1_h1(const TwoSpectra& spectra, double omega1, const BorgOptions& opts) {
  const int M = opts.modes;
  if (M < 1) throw_domain("Borg step needs at least one mode");
  const long P = opts.pairs > 0 ? opts.pairs : 2L * M;
  const double d = spectra.d;
  if (!(d > 0.0 && d <= 0.5)) throw_domain("d must satisfy 0 < d <= 1/2");
  check_labels(spectra.mu, "mu");
  check_labels(spectra.nu, "nu");
  if (interlacing_violations(spectra) > 0) {
    throw_domain("interlacing of the two spectra violated: input rejected");
  }

  std::vector<Target> targets;
  long n_mu = 0, n_nu = 0;
  for (std::size_t i = 0; i < spectra.mu.size(); ++i) {
    if (spectra.mu.indices[i] < P) {
      targets.push_back({EndCondition::dirichlet, spectra.mu.indices[i], spectra.mu.values[i]});
      ++n_mu;
    }
  }
  for (std::size_t i = 0; i < spectra.nu.size(); ++i) {
    if (spectra.nu.indices[i] < P) {
      targets.push_back({EndCondition::neumann, spectra.nu.indices[i], spectra.nu.values[i]});
      ++n_nu;
    }
  }
  if (n_mu < M + 4 || n_nu < M + 4) {
    throw_domain("Borg step needs at least M + 4 entries of each spectrum among the fitted labels");
  }

  const std::size_t T = targets.size();
  const Potential shape = Potential::constant(d, 0.0, opts.nodes_per_unit);
  const std::size_t nodes = shape.nodes();
  const std::size_t cells = nodes - 1;
  // cosine samples, with the same integer phase reduction as cosine_series
  Eigen::MatrixXd C(M, nodes);
  Eigen::VectorXd trap(M);
  for (int k = 0; k < M; ++k) {
    for (std::size_t i = 0; i < nodes; ++i) {
      const std::size_t phase = (static_cast<std::size_t>(k) * i) % (2 * cells);
      C(k, i) = std::cos(pi * static_cast<double>(phase) / static_cast<double>(cells));
    }
    trap(k) = shape.spacing() * (C.row(k).sum() - 0.5 * (C(k, 0) + C(k, nodes - 1)));
  }
  const std::vector<double> wv = node_weights(shape);
  const Eigen::Map<const Eigen::VectorXd> w(wv.data(), static_cast<long>(nodes));

  struct Model {
    Eigen::VectorXd r;
    Eigen::MatrixXd J;
    std::vector<double> energy;
    double cost = std::numeric_limits<double>::infinity();
    bool ok = false;
  };

  auto build = [&](const Eigen::VectorXd& c, Potential& q, double& h) {
    q = Potential::cosine_series(d, std::span<const double>(c.data(), static_cast<std::size_t>(M)),
                                 opts.nodes_per_unit);
    h = omega1 - 0.5 * q.integral();
  };

  auto evaluate = [&](const Eigen::VectorXd& c, const std::vector<double>& guess,
                      bool analytic_jacobian) {
    Model m;
    m.r.resize(static_cast<long>(T));
    m.energy.resize(T);
    if (analytic_jacobian) m.J.resize(static_cast<long>(T), M);
    Potential q;
    double h = 0.0;
    build(c, q, h);
    try {
      for (std::size_t j = 0; j < T; ++j) {
        const Target& t = targets[j];
        const double g = guess.empty() ? default_guess(t.end, t.n, d) : guess[j];
        const HalfEigen e = solve_half(q, h, t.end, t.n, g, opts.ode, analytic_jacobian);
        const double val = signed_sqrt(e.energy);
        const double wt = static_cast<double>(t.n + 1);
        m.energy[j] = e.energy;
        m.r(static_cast<long>(j)) = wt * (val - t.value);
        if (analytic_jacobian) {
          // dE/dc_k = (int C_k y^2 - 1/2 trap(C_k)) / int y^2, the second term
          // through h1 = omega1 - 1/2 int q1 and dE/dh1 = y(0)^2 / int y^2.
          const Eigen::Map<const Eigen::VectorXd> y(e.nodes.data(), static_cast<long>(nodes));
          const Eigen::VectorXd wy2 = w.cwiseProduct(y.cwiseAbs2());
          const double norm = wy2.sum();
          const Eigen::VectorXd dE = (C * wy2 - 0.5 * trap) / norm;
          const double dval = 1.0 / (2.0 * std::max(std::abs(val), 1e-8));
          m.J.row(static_cast<long>(j)) = wt * dval * dE.transpose();
        }
      }
    } catch (const Error&) {
      return m;  // treated as an infinitely bad trial point
    }
    m.cost = m.r.norm();
    m.ok = std::isfinite(m.cost);
    return m;
  };

  auto fd_jacobian = [&](const Eigen::VectorXd& c, const Model& base) {
    Eigen::MatrixXd J(static_cast<long>(T), M);
    for (int k = 0; k < M; ++k) {
      Eigen::VectorXd cp = c;
      cp(k) += opts.fd_step;
      const Model mp = evaluate(cp, base.energy, false);
      if (!mp.ok) throw_domain("Borg step diverged: forward model failed in the Jacobian");
      J.col(k) = (mp.r - base.r) / opts.fd_step;
    }
    return J;
  };

  const bool analytic = opts.jacobian == BorgJacobian::analytic;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(M);
  Model cur = evaluate(c, {}, analytic);
  if (!cur.ok) throw_domain("Borg step diverged: forward model failed at the initial guess");
  if (!analytic) cur.J = fd_jacobian(c, cur);

  double damping = opts.initial_damping;
  int iter = 0;
  bool converged = cur.cost <= opts.tolerance;
  while (!converged) {
    if (iter >= opts.max_iterations) {
      throw_domain("Borg step diverged after " + std::to_string(iter) +
                   " iterations (residual " + detail::fmt17(cur.cost) + ")");
    }
    ++iter;
    const Eigen::MatrixXd A = cur.J.transpose() * cur.J;
    const Eigen::VectorXd g = cur.J.transpose() * cur.r;
    const double floor = 1e-12 * std::max(A.diagonal().maxCoeff(), 1e-300);
    bool accepted = false;
    Eigen::VectorXd delta;
    Model next;
    while (!accepted) {
      Eigen::MatrixXd Ad = A;
      for (int k = 0; k < M; ++k) Ad(k, k) += damping * std::max(A(k, k), floor);
      delta = Ad.ldlt().solve(-g);
      next = evaluate(c + delta, cur.energy, analytic);
      if (next.ok && next.cost < cur.cost) {
        accepted = true;
        damping = std::max(damping / 3.0, 1e-15);
      } else {
        damping *= 10.0;
        if (damping > 1e12) break;
      }
    }
    if (!accepted) {
      converged = true;  // no descent direction left: a stationary point
      break;
    }
    const double gain = cur.cost - next.cost;
    c += delta;
    if (!analytic) next.J = fd_jacobian(c, next);
    cur = std::move(next);
    if (cur.cost <= opts.tolerance || gain <= 1e-12 * cur.cost ||
        delta.norm() <= 1e-13 * (1.0 + c.norm())) {
      converged = true;
    }
  }

  BorgResult res;
  build(c, res.q1, res.h1);
  res.coeffs.assign(c.data(), c.data() + M);
  res.residual = cur.cost;
  res.constraint_error = std::abs(omega(res.q1, res.h1) - omega1);
  res.iterations = iter;
  res.exact = cur.cost <= opts.tolerance;
  return res;
}

double borg_residual_check(const Potential& q1, double h1, const TwoSpectra& spectra, int pairs,
                           const OdeOptions& opts) {
  const TwoSpectra model = half_spectra_scan(q1, h1, pairs, opts);
  double s = 0.0;
  auto add = [&](const Spectrum& target, const Spectrum& fit) {
    std::map<long, double> byn;
    for (std::size_t i = 0; i < fit.size(); ++i) byn[fit.indices[i]] = fit.values[i];
    for (std::size_t i = 0; i < target.size(); ++i) {
      const long n = target.indices[i];
      if (n >= pairs) continue;
      const auto it = byn.find(n);
      if (it == byn.end()) throw_domain("no model eigenvalue for label " + std::to_string(n));
      const double e = static_cast<double>(n + 1) * (it->second - target.values[i]);
      s += e * e;
    }
  };
  add(spectra.mu, model.mu);
  add(spectra.nu, model.nu);
  return std::sqrt(s);
}

}  // namespace sldisc
