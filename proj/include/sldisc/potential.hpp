#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sldisc {

inline constexpr int kDefaultNodesPerUnit = 2048;

/// Real potential on [0, length], stored on a uniform grid and evaluated by
/// piecewise-linear interpolation. Integrals use the trapezoid rule, which is
/// exact for the interpolant.
class Potential {
 public:
  Potential() = default;
  Potential(double length, std::vector<double> values);

  static std::size_t node_count(double length,
                                int nodes_per_unit = kDefaultNodesPerUnit);
  static Potential constant(double length, double value,
                            int nodes_per_unit = kDefaultNodesPerUnit);
  static Potential sampled(double length, const std::function<double(double)>& f,
                           int nodes_per_unit = kDefaultNodesPerUnit);
  /// sum_k coeffs[k] cos(k pi x / length)
  static Potential cosine_series(double length, std::span<const double> coeffs,
                                 int nodes_per_unit = kDefaultNodesPerUnit);

  double length() const noexcept { return length_; }
  std::size_t nodes() const noexcept { return values_.size(); }
  std::size_t cells() const noexcept { return values_.size() - 1; }
  double spacing() const noexcept { return spacing_; }
  double x(std::size_t i) const noexcept;
  double value(std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  bool empty() const noexcept { return values_.empty(); }

  double operator()(double x) const;

  double integral() const;
  double max_abs() const;
  double min_value() const;

  /// L2 norm of the piecewise-linear interpolant.
  double l2_norm() const;
  /// L2 distance; both potentials must live on the same grid.
  double l2_distance(const Potential& other) const;

  Potential shifted(double c) const;
  /// x -> q(length - x), on the mirrored grid.
  Potential reversed() const;

  bool same_grid(const Potential& other) const noexcept;
  bool operator==(const Potential& other) const = default;

 private:
  double length_ = 0.0;
  double spacing_ = 0.0;
  std::vector<double> values_;
};

/// Plain text: header `length=<real> nodes=<int>`, then `x value` per line.
std::string format_potential(const Potential& q);
Potential parse_potential(const std::string& text);
void write_potential(const Potential& q, const std::string& path);
Potential read_potential(const std::string& path);

}  // namespace sldisc
