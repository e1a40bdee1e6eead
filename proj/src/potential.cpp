#include "sldisc/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sldisc/error.hpp"
#include "text_format.hpp"

namespace sldisc {

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw_io("read failure on '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open '" + path + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw_io("write failure on '" + path + "'");
}

}  // namespace detail

Potential::Potential(double length, std::vector<double> values)
    : length_(length), values_(std::move(values)) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw_domain("potential length must be positive and finite");
  }
  if (values_.size() < 2) throw_domain("potential needs at least two grid nodes");
  for (double v : values_) {
    if (!std::isfinite(v)) throw_domain("potential values must be finite");
  }
  spacing_ = length_ / static_cast<double>(values_.size() - 1);
}

std::size_t Potential::node_count(double length, int nodes_per_unit) {
  const auto cells = static_cast<std::size_t>(
      std::max(1.0, std::round(length * static_cast<double>(nodes_per_unit))));
  return cells + 1;
}

Potential Potential::constant(double length, double value, int nodes_per_unit) {
  return Potential(length, std::vector<double>(node_count(length, nodes_per_unit), value));
}

Potential Potential::sampled(double length, const std::function<double(double)>& f,
                             int nodes_per_unit) {
  const std::size_t n = node_count(length, nodes_per_unit);
  std::vector<double> v(n);
  const double h = length / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = f(i + 1 == n ? length : static_cast<double>(i) * h);
  }
  return Potential(length, std::move(v));
}

Potential Potential::cosine_series(double length, std::span<const double> coeffs,
                                   int nodes_per_unit) {
  const std::size_t n = node_count(length, nodes_per_unit);
  const std::size_t cells = n - 1;
  std::vector<double> v(n, 0.0);
  // cos(k pi i / cells) evaluated through an exact integer phase reduction
  // keeps the samples identical for equal coefficient vectors.
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      const std::size_t phase = (k * i) % (2 * cells);
      s += coeffs[k] *
           std::cos(std::numbers::pi * static_cast<double>(phase) / static_cast<double>(cells));
    }
    v[i] = s;
  }
  return Potential(length, std::move(v));
}

double Potential::x(std::size_t i) const noexcept {
  return i + 1 == values_.size() ? length_ : static_cast<double>(i) * spacing_;
}

double Potential::operator()(double x) const {
  if (!(x >= 0.0 && x <= length_)) throw_domain("potential evaluated outside its interval");
  const double t = x / spacing_;
  auto i = static_cast<std::size_t>(t);
  if (i >= cells()) i = cells() - 1;
  const double frac = t - static_cast<double>(i);
  return values_[i] + frac * (values_[i + 1] - values_[i]);
}

double Potential::integral() const {
  double s = 0.5 * (values_.front() + values_.back());
  for (std::size_t i = 1; i + 1 < values_.size(); ++i) s += values_[i];
  return s * spacing_;
}

double Potential::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Potential::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double Potential::l2_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
    const double a = values_[i], b = values_[i + 1];
    s += a * a + a * b + b * b;
  }
  return std::sqrt(s * spacing_ / 3.0);
}

double Potential::l2_distance(const Potential& other) const {
  if (!same_grid(other)) throw_domain("l2_distance requires identical grids");
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
    const double a = values_[i] - other.values_[i];
    const double b = values_[i + 1] - other.values_[i + 1];
    s += a * a + a * b + b * b;
  }
  return std::sqrt(s * spacing_ / 3.0);
}

Potential Potential::shifted(double c) const {
  std::vector<double> v = values_;
  for (double& x : v) x += c;
  return Potential(length_, std::move(v));
}

Potential Potential::reversed() const {
  std::vector<double> v(values_.rbegin(), values_.rend());
  return Potential(length_, std::move(v));
}

bool Potential::same_grid(const Potential& other) const noexcept {
  return values_.size() == other.values_.size() && length_ == other.length_;
}

std::string format_potential(const Potential& q) {
  std::string out = "length=" + detail::fmt17(q.length()) +
                    " nodes=" + std::to_string(q.nodes()) + "\n";
  for (std::size_t i = 0; i < q.nodes(); ++i) {
    out += detail::fmt17(q.x(i));
    out += ' ';
    out += detail::fmt17(q.value(i));
    out += '\n';
  }
  return out;
}

Potential parse_potential(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw_config("potential file: missing header");
  double length = 0.0;
  long nodes = 0;
  {
    std::istringstream hs(line);
    std::string a, b;
    hs >> a >> b;
    if (a.rfind("length=", 0) != 0 || b.rfind("nodes=", 0) != 0) {
      throw_config("potential file: header must be 'length=<real> nodes=<int>'");
    }
    auto l = detail::parse_real(a.substr(7));
    auto n = detail::parse_int(b.substr(6));
    if (!l || !n || *n < 2 || !(*l > 0.0)) throw_config("potential file: bad header values");
    length = *l;
    nodes = *n;
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(nodes));
  double prev_x = -1.0;
  const double h = length / static_cast<double>(nodes - 1);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    std::istringstream ls{std::string(t)};
    std::string xs, vs;
    ls >> xs >> vs;
    auto xv = detail::parse_real(xs);
    auto vv = detail::parse_real(vs);
    if (!xv || !vv) {
      throw_config("potential file line " + std::to_string(lineno) + ": expected 'x value'");
    }
    if (!(*xv > prev_x)) {
      throw_config("potential file line " + std::to_string(lineno) + ": grid not increasing");
    }
    const double expect = static_cast<double>(values.size()) * h;
    if (std::abs(*xv - expect) > 1e-9 * length) {
      throw_config("potential file line " + std::to_string(lineno) + ": grid not uniform");
    }
    prev_x = *xv;
    values.push_back(*vv);
  }
  if (values.size() != static_cast<std::size_t>(nodes)) {
    throw_config("potential file: node count does not match header");
  }
  if (prev_x != length) throw_config("potential file: last node must equal length");
  return Potential(length, std::move(values));
}

void write_potential(const Potential& q, const std::string& path) {
  detail::write_file(path, format_potential(q));
}

Potential read_potential(const std::string& path) {
  return parse_potential(detail::read_file(path));
}

}  // namespace sldisc
