#include "sldisc/config.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "sldisc/error.hpp"
#include "text_format.hpp"

namespace sldisc {

namespace {

using Fail = std::function<void(const std::string&)>;

double real_of(const std::string& v, const Fail& fail) {
  const auto x = detail::parse_real(v);
  if (!x) fail("malformed number '" + v + "'");
  return *x;
}

long long int_of(const std::string& v, const Fail& fail, long long lo,
                 long long hi = std::numeric_limits<int>::max()) {
  const auto x = detail::parse_int(v);
  if (!x) fail("malformed integer '" + v + "'");
  if (*x < lo || *x > hi) fail("value " + v + " out of range");
  return *x;
}

bool bool_of(const std::string& v, const Fail& fail) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail("expected true or false, got '" + v + "'");
  return false;
}

std::vector<std::string> words(const std::string& v) {
  std::istringstream in(v);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::vector<double> reals_of(const std::string& v, const Fail& fail) {
  std::vector<double> out;
  for (const auto& w : words(v)) out.push_back(real_of(w, fail));
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (double x : xs) s += (s.empty() ? "" : " ") + detail::fmt17(x);
  return s;
}

std::string join(const std::vector<long>& xs) {
  std::string s;
  for (long x : xs) s += (s.empty() ? "" : " ") + std::to_string(x);
  return s;
}

std::string resolve(const std::string& v, const std::string& base, const Fail& fail) {
  namespace fs = std::filesystem;
  fs::path p(v);
  if (p.is_relative() && !base.empty()) p = fs::path(base) / p;
  if (!fs::exists(p)) fail("file not found: " + p.string());
  return p.lexically_normal().string();
}

struct Key {
  const char* name;
  std::function<void(RunConfig&, const std::string&, const std::string&, const Fail&)> set;
  std::function<std::optional<std::string>(const RunConfig&)> show;  // nullopt: omit from echo
};

std::optional<std::string> num(double x) { return detail::fmt17(x); }
std::optional<std::string> integer(long long x) { return std::to_string(x); }

void set_series(PotentialSource& p, const char* name, const Fail& fail) {
  if (!p.file.empty()) fail(std::string(name) + " conflicts with a potential file");
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back({"mode",
                 [](RunConfig& c, const std::string& v, const std::string&, const Fail& fail) {
                   static const char* modes[] = {"forward", "ip1", "ip2", "roundtrip",
                                                 "stability", "basis-check"};
                   for (const char* m : modes) {
                     if (v == m) {
                       c.mode = v;
                       return;
                     }
                   }
                   fail("unknown mode '" + v + "'");
                 },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   if (c.mode.empty()) return std::nullopt;
                   return c.mode;
                 }});
    k.push_back({"d",
                 [](RunConfig& c, const std::string& v, const std::string&, const Fail& fail) {
                   const double d = real_of(v, fail);
                   if (!(d > 0.0 && d <= 0.5)) fail("d must satisfy 0 < d <= 1/2");
                   c.d = d;
                 },
                 [](const RunConfig& c) { return num(c.d); }});
    for (int which = 1; which <= 2; ++which) {
      PotentialSource RunConfig::*m = which == 1 ? &RunConfig::q1 : &RunConfig::q2;
      const bool first = which == 1;
      k.push_back({first ? "q1" : "q2",
                   [m, first](RunConfig& c, const std::string& v, const std::string&, const Fail& fail) {
                     set_series(c.*m, first ? "q1" : "q2", fail);
                     (c.*m).constant = real_of(v, fail);
                   },
                   [m](const RunConfig& c) -> std::optional<std::string> {
                     if (!(c.*m).file.empty()) return std::nullopt;
                     return num((c.*m).constant);
                   }});
      k.push_back({first ? "q1_cos" : "q2_cos",
                   [m, first](RunConfig& c, const std::string& v, const std::string&, const Fail& fail) {
                     set_series(c.*m, first ? "q1_cos" : "q2_cos", fail);
                     (c.*m).cos_coeffs = reals_of(v, fail);
                   },
                   [m](const RunConfig& c) -> std::optional<std::string> {
                     if ((c.*m).cos_coeffs.empty()) return std::nullopt;
                     return join((c.*m).cos_coeffs);
                   }});
      k.push_back({first ? "q1_sin" : "q2_sin",
                   [m, first](RunConfig& c, const std::string& v, const std::string&, const Fail& fail) {
                     set_series(c.*m, first ? "q1_sin" : "q2_sin", fail);
                     (c.*m).sin_coeffs = reals_of(v, fail);
                   },
                   [m](const RunConfig& c) -> std::optional<std::string> {
                     if ((c.*m).sin_coeffs.empty()) return std::nullopt;
                     return join((c.*m).sin_coeffs);
                   }});
      k.push_back({first ? "q1_file" : "q2_file",
                   [m](RunConfig& c, const std::string& v, const std::string& base, const Fail& fail) {
                     const PotentialSource& p = c.*m;
                     if (p.constant != 0.0 || !p.cos_coeffs.empty() || !p.sin_coeffs.empty()) {
                       fail("a potential file conflicts with series coefficients");
                     }
                     (c.*m).file = resolve(v, base, fail);
                   },
                   [m](const RunConfig& c) -> std::optional<std::string> {
                     if ((c.*m).file.empty()) return std::nullopt;
                     return (c.*m).file;
                   }});
    }
    auto real_key = [&k](const char* name, double RunConfig::*m, auto check) {
      k.push_back({name,
                   [m, check](RunConfig& c, const std::string& v, const std::string&, const Fail& fail) {
                     const double x = real_of(v, fail);
                     check(x, fail);
                     c.*m = x;
                   },
                   [m](const RunConfig& c) { return num(c.*m); }});
    };
    auto any = [](double, const Fail&) {};
    auto positive = [](double x, const Fail& fail) {
      if (!(x > 0.0)) fail("value must be positive");
    };
    auto nonnegative = [](double x, const Fail& fail) {
      if (x < 0.0) fail("value must be nonnegative");
    };
    real_key("h1", &RunConfig::h1, any);
    real_key("h2", &RunConfig::h2, any);
    real_key("a1", &RunConfig::a1, [](double x, const Fail& fail) {
      if (!(x > 0.0)) fail("a1 must be positive");
    });
    real_key("a2", &RunConfig::a2, any);
    k.push_back({"omega1",
                 [](RunConfig& c, const std::string& v, const std::string&, const Fail& fail) {
                   c.omega1 = real_of(v, fail);
                 },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   if (!c.omega1) return std::nullopt;
                   return num(*c.omega1);
                 }});
    k.push_back({"spectrum_file",
                 [](RunConfig& c, const std::string& v, const std::string& base, const Fail& fail) {
                   c.spectrum_file = resolve(v, base, fail);
                 },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   if (c.spectrum_file.empty()) return std::nullopt;
                   return c.spectrum_file;
                 }});
    k.push_back({"index_set",
                 [](RunConfig& c, const std::string& v, const std::string&, const Fail& fail) {
                   std::vector<long> I;
                   for (const auto& w : words(v)) {
                     const long n = static_cast<long>(int_of(w, fail, 0));
                     if (!I.empty() && n <= I.back()) fail("index_set must be strictly increasing");
                     I.push_back(n);
                   }
                   if (I.empty()) fail("index_set is empty");
                   c.index_set = std::move(I);
                 },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   if (c.index_set.empty()) return std::nullopt;
                   return join(c.index_set);
                 }});
    auto int_key = [&k](const char* name, int RunConfig::*m, long long lo) {
      k.push_back({name,
                   [m, lo](RunConfig& c, const std::string& v, const std::string&, const Fail& fail) {
                     c.*m = static_cast<int>(int_of(v, fail, lo));
                   },
                   [m](const RunConfig& c) { return integer(c.*m); }});
    };
    int_key("num_eigenvalues", &RunConfig::num_eigenvalues, 0);
    int_key("truncation", &RunConfig::truncation, 1);
    int_key("guard", &RunConfig::guard, 0);
    k.push_back({"tail_start",
                 [](RunConfig& c, const std::string& v, const std::string&, const Fail& fail) {
                   const long t = static_cast<long>(int_of(v, fail, 0));
                   if (t == 1) fail("tail_start must be 0 (automatic) or at least 2");
                   c.tail_start = t;
                 },
                 [](const RunConfig& c) { return integer(c.tail_start); }});
    int_key("borg_modes", &RunConfig::borg_modes, 0);
    int_key("borg_pairs", &RunConfig::borg_pairs, 0);
    int_key("borg_max_iterations", &RunConfig::borg_max_iterations, 1);
    real_key("borg_tolerance", &RunConfig::borg_tolerance, positive);
    k.push_back({"borg_jacobian",
                 [](RunConfig& c, const std::string& v, const std::string&, const Fail& fail) {
                   if (v != "analytic" && v != "finite_difference") {
                     fail("borg_jacobian must be analytic or finite_difference");
                   }
                   c.borg_jacobian = v;
                 },
                 [](const RunConfig& c) -> std::optional<std::string> { return c.borg_jacobian; }});
    k.push_back({"override_completeness",
                 [](RunConfig& c, const std::string& v, const std::string&, const Fail& fail) {
                   c.override_completeness = bool_of(v, fail);
                 },
                 [](const RunConfig& c) -> std::optional<std::string> {
                   return c.override_completeness ? "true" : "false";
                 }});
    real_key("rtol", &RunConfig::rtol, positive);
    real_key("atol", &RunConfig::atol, positive);
    real_key("lambda_min", &RunConfig::lambda_min, positive);
    real_key("max_condition", &RunConfig::max_condition, positive);
    int_key("nodes_per_unit", &RunConfig::nodes_per_unit, 16);
    k.push_back({"seed",
                 [](RunConfig& c, const std::string& v, const std::string&, const Fail& fail) {
                   const auto s = detail::parse_int(v);
                   if (!s || *s < 0) fail("seed must be a nonnegative integer");
                   c.seed = static_cast<std::uint64_t>(*s);
                 },
                 [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.seed); }});
    real_key("epsilon", &RunConfig::epsilon, nonnegative);
    k.push_back({"epsilons",
                 [](RunConfig& c, const std::string& v, const std::string&, const Fail& fail) {
                   std::vector<double> e = reals_of(v, fail);
                   if (e.empty()) fail("epsilons is empty");
                   for (double x : e) {
                     if (x < 0.0) fail("epsilons must be nonnegative");
                   }
                   c.epsilons = std::move(e);
                 },
                 [](const RunConfig& c) -> std::optional<std::string> { return join(c.epsilons); }});
    int_key("trials", &RunConfig::trials, 1);
    int_key("fidelity_count", &RunConfig::fidelity_count, 1);
    int_key("threads", &RunConfig::threads, 0);
    return k;
  }();
  return table;
}

void apply(RunConfig& cfg, const std::string& key, const std::string& value,
           const std::string& base, const std::string& where) {
  const Fail fail = [&](const std::string& why) { throw_config(where + ": " + key + ": " + why); };
  for (const Key& k : keys()) {
    if (key == k.name) {
      k.set(cfg, value, base, fail);
      return;
    }
  }
  throw_config(where + ": unknown key '" + key + "'");
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value,
                      const std::string& where) {
  apply(cfg, key, value, "", where);
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t(detail::trim(line));
    if (t.empty()) continue;
    const std::string where = "config line " + std::to_string(lineno);
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw_config(where + ": expected 'key = value'");
    const std::string key(detail::trim(t.substr(0, eq)));
    const std::string value(detail::trim(t.substr(eq + 1)));
    if (key.empty()) throw_config(where + ": missing key");
    if (value.empty()) throw_config(where + ": missing value for '" + key + "'");
    apply(cfg, key, value, base_dir, where);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  const std::string base = std::filesystem::path(path).parent_path().string();
  return parse_config(detail::read_file(path), base);
}

std::string format_config(const RunConfig& cfg) {
  std::string out;
  for (const Key& k : keys()) {
    if (const auto v = k.show(cfg)) out += std::string(k.name) + " = " + *v + '\n';
  }
  return out;
}

Potential build_potential(const PotentialSource& src, double length, int nodes_per_unit) {
  if (!src.file.empty()) {
    Potential q = read_potential(src.file);
    if (std::abs(q.length() - length) > 1e-12) {
      throw_config("potential file " + src.file + " has length " + detail::fmt17(q.length()) +
                   ", expected " + detail::fmt17(length));
    }
    return q;
  }
  Potential q = Potential::cosine_series(length, src.cos_coeffs, nodes_per_unit);
  if (src.constant == 0.0 && src.sin_coeffs.empty()) return q;
  const auto sines = src.sin_coeffs;
  const Potential s = Potential::sampled(
      length,
      [&](double x) {
        double v = 0.0;
        for (std::size_t k = 0; k < sines.size(); ++k) {
          v += sines[k] * std::sin(static_cast<double>(k + 1) * std::numbers::pi * x / length);
        }
        return v;
      },
      nodes_per_unit);
  std::vector<double> v(q.values().begin(), q.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += s.value(i) + src.constant;
  return Potential(length, std::move(v));
}

ProblemSpec build_problem(const RunConfig& cfg) {
  ProblemSpec s;
  s.d = cfg.d;
  s.q1 = build_potential(cfg.q1, cfg.d, cfg.nodes_per_unit);
  s.q2 = build_potential(cfg.q2, 1.0 - cfg.d, cfg.nodes_per_unit);
  s.h1 = cfg.h1;
  s.h2 = cfg.h2;
  s.a1 = cfg.a1;
  s.a2 = cfg.a2;
  s.validate();
  return s;
}

PipelineOptions pipeline_options(const RunConfig& cfg) {
  PipelineOptions o;
  o.truncation = cfg.truncation;
  o.guard = cfg.guard;
  o.tail_start = cfg.tail_start;
  o.borg_modes = cfg.borg_modes;
  o.borg_pairs = cfg.borg_pairs;
  o.override_completeness = cfg.override_completeness;
  o.nodes_per_unit = cfg.nodes_per_unit;
  o.solve.max_condition = cfg.max_condition;
  o.solve.nodes_per_unit = cfg.nodes_per_unit;
  o.eigen.ode.rtol = cfg.rtol;
  o.eigen.ode.atol = cfg.atol;
  o.eigen.lambda_min = cfg.lambda_min;
  o.borg.ode = o.eigen.ode;
  o.borg.max_iterations = cfg.borg_max_iterations;
  o.borg.tolerance = cfg.borg_tolerance;
  o.borg.jacobian = cfg.borg_jacobian == "analytic" ? BorgJacobian::analytic
                                                    : BorgJacobian::finite_difference;
  return o;
}

}  // namespace sldisc
