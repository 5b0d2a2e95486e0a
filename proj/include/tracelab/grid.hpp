#pragma once

// Grids, power weights and the weighted midpoint quadrature on which every
// norm in the library is computed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tracelab/error.hpp"

namespace tracelab::grid {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Uniform cell-midpoint grid t_n = origin + (n + 1/2) * step, n = 0..count-1.
///
/// A grid with origin >= 0 discretizes the half-line (origin, inf); a grid
/// with negative origin is read as a window of the full line.  No node may
/// sit on t = 0, so power weights with negative exponent stay finite.
class Grid1D {
 public:
  Grid1D(double origin, double step, std::size_t count)
      : origin_(origin), step_(step), count_(count) {
    detail::require(std::isfinite(origin), "Grid1D: origin must be finite");
    detail::require(step > 0.0 && std::isfinite(step), "Grid1D: step must be > 0");
    detail::require(count >= 2, "Grid1D: count must be >= 2");
    // t_n == 0 exactly when origin/step is a negative half-integer.
    const double shifted = -origin / step - 0.5;
    if (origin < 0.0 && shifted <= static_cast<double>(count - 1)) {
      const double r = std::round(shifted);
      detail::require(std::abs(shifted - r) > 1e-9, "Grid1D: a node coincides with t = 0");
    }
  }

  /// Half-line grid on (0, step * count).
  static Grid1D half_line(double step, std::size_t count) { return {0.0, step, count}; }

  /// Full-line grid symmetric about 0 with `count_per_side` nodes on each side.
  static Grid1D symmetric(double step, std::size_t count_per_side) {
    return {-step * static_cast<double>(count_per_side), step, 2 * count_per_side};
  }

  [[nodiscard]] double origin() const noexcept { return origin_; }
  [[nodiscard]] double step() const noexcept { return step_; }
  [[nodiscard]] std::size_t count() const noexcept { return count_; }
  [[nodiscard]] double end() const noexcept {
    return origin_ + step_ * static_cast<double>(count_);
  }
  [[nodiscard]] bool is_half_line() const noexcept { return origin_ >= 0.0; }

  [[nodiscard]] double node(std::size_t n) const noexcept {
    return origin_ + (static_cast<double>(n) + 0.5) * step_;
  }

  [[nodiscard]] std::vector<double> nodes() const {
    std::vector<double> t(count_);
    for (std::size_t n = 0; n < count_; ++n) t[n] = node(n);
    return t;
  }

  /// Index of the node nearest to t, or -1 when t lies outside the grid cells.
  [[nodiscard]] std::ptrdiff_t nearest(double t) const noexcept {
    const double x = (t - origin_) / step_;
    if (!(x >= 0.0) || x >= static_cast<double>(count_)) return -1;
    return static_cast<std::ptrdiff_t>(x);
  }

  /// Same interval, half the step.
  [[nodiscard]] Grid1D refined() const { return {origin_, 0.5 * step_, 2 * count_}; }

  /// Grid with `count` cells of the given step, keeping the origin.
  [[nodiscard]] Grid1D with_count(std::size_t count) const { return {origin_, step_, count}; }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double origin_;
  double step_;
  std::size_t count_;
};

/// Power weight w(t) = |t|^gamma, gamma > -1.
class PowerWeight {
 public:
  explicit PowerWeight(double gamma = 0.0) : gamma_(gamma) {
    detail::require(gamma > -1.0 && std::isfinite(gamma), "PowerWeight: exponent must be > -1");
  }

  [[nodiscard]] double exponent() const noexcept { return gamma_; }
  [[nodiscard]] double operator()(double t) const noexcept {
    return gamma_ == 0.0 ? 1.0 : std::pow(std::abs(t), gamma_);
  }

  /// Muckenhoupt A_p membership of |t|^gamma.
  [[nodiscard]] bool in_ap(double p) const noexcept { return gamma_ > -1.0 && gamma_ < p - 1.0; }

  void require_ap(double p) const {
    if (!in_ap(p)) {
      throw HypothesisError("weight exponent " + std::to_string(gamma_) + " is not in A_" +
                            std::to_string(p) + " (need -1 < gamma < p - 1)");
    }
  }

 private:
  double gamma_;
};

/// Multiplicative scale grid t_j = kappa * 2^{-j}, j_min <= j <= j_max.  Each
/// level carries the dt/t measure ln 2 of its dyadic cell.
class DyadicLevels {
 public:
  DyadicLevels(int j_min, int j_max, double kappa = 1.0)
      : j_min_(j_min), j_max_(j_max), kappa_(kappa) {
    detail::require(j_min <= j_max, "DyadicLevels: j_min must be <= j_max");
    detail::require(kappa > 0.0 && std::isfinite(kappa), "DyadicLevels: kappa must be > 0");
  }

  /// Smallest level window whose scales cover [t_lo, t_hi].
  static DyadicLevels covering(double t_lo, double t_hi, double kappa = 1.0) {
    detail::require(t_lo > 0.0 && t_hi >= t_lo, "DyadicLevels::covering: need 0 < t_lo <= t_hi");
    const int j_min = static_cast<int>(std::floor(std::log2(kappa / t_hi)));
    const int j_max = static_cast<int>(std::ceil(std::log2(kappa / t_lo)));
    return {j_min, j_max, kappa};
  }

  [[nodiscard]] int j_min() const noexcept { return j_min_; }
  [[nodiscard]] int j_max() const noexcept { return j_max_; }
  [[nodiscard]] double kappa() const noexcept { return kappa_; }
  [[nodiscard]] std::size_t size() const noexcept {
    return static_cast<std::size_t>(j_max_ - j_min_ + 1);
  }
  [[nodiscard]] double scale(int j) const noexcept { return std::ldexp(kappa_, -j); }
  [[nodiscard]] static double log_weight() noexcept { return std::numbers::ln2; }

 private:
  int j_min_;
  int j_max_;
  double kappa_;
};

/// Default state-space norm: absolute value for scalars.
struct AbsNorm {
  double operator()(double x) const noexcept { return std::abs(x); }
  double operator()(const std::complex<double>& z) const noexcept { return std::abs(z); }
};

/// Weighted l^q norm (sum_n (w_n |x_n|)^q)^{1/q} on coordinate vectors.
struct WeightedSeqNorm {
  std::vector<double> weights;
  double q = 2.0;

  double operator()(std::span<const double> x) const {
    detail::require(x.size() == weights.size(), "WeightedSeqNorm: dimension mismatch");
    if (std::isinf(q)) {
      double m = 0.0;
      for (std::size_t n = 0; n < x.size(); ++n) m = std::max(m, weights[n] * std::abs(x[n]));
      return m;
    }
    double s = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) s += std::pow(weights[n] * std::abs(x[n]), q);
    return std::pow(s, 1.0 / q);
  }
  double operator()(const std::vector<double>& x) const {
    return (*this)(std::span<const double>(x));
  }
};

/// Time samples of a function with values in a state space V.
template <class V>
class SampledFunction {
 public:
  using value_type = V;

  SampledFunction(Grid1D grid, std::vector<V> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.count()) {
      throw PreconditionError("SampledFunction: " + std::to_string(values_.size()) +
                              " values for a grid of " + std::to_string(grid_.count()) +
                              " nodes");
    }
  }

  /// Sample fn at every node.
  template <class Fn>
  static SampledFunction sample(const Grid1D& grid, Fn&& fn) {
    std::vector<V> v;
    v.reserve(grid.count());
    for (std::size_t n = 0; n < grid.count(); ++n) v.push_back(fn(grid.node(n)));
    return {grid, std::move(v)};
  }

  [[nodiscard]] const Grid1D& grid() const noexcept { return grid_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] const std::vector<V>& values() const noexcept { return values_; }
  [[nodiscard]] std::vector<V>& values() noexcept { return values_; }
  [[nodiscard]] const V& operator[](std::size_t n) const noexcept { return values_[n]; }
  [[nodiscard]] V& operator[](std::size_t n) noexcept { return values_[n]; }

 private:
  Grid1D grid_;
  std::vector<V> values_;
};

using ScalarFunction = SampledFunction<double>;
using VectorFunction = SampledFunction<std::vector<double>>;

namespace detail {

using tracelab::detail::require;

template <class V, class Norm>
std::vector<double> pointwise_norms(const SampledFunction<V>& f, const Norm& norm) {
  std::vector<double> out(f.size());
  for (std::size_t n = 0; n < f.size(); ++n) {
    const double v = norm(f[n]);
    if (!std::isfinite(v)) {
      throw PreconditionError("non-finite sample at node " + std::to_string(n));
    }
    out[n] = v;
  }
  return out;
}

}  // namespace detail

/// Midpoint-rule value of ||r||_{L^p(w)} for node-wise magnitudes r on grid.
inline double weighted_lp_norm_of(const Grid1D& grid, std::span<const double> r, double p,
                                  const PowerWeight& w) {
  if (r.size() != grid.count()) throw PreconditionError("weighted_lp_norm: length mismatch");
  detail::require(p >= 1.0, "weighted_lp_norm: p must be >= 1 or infinite");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : r) {
      if (!std::isfinite(v)) throw PreconditionError("weighted_lp_norm: non-finite value");
      m = std::max(m, std::abs(v));
    }
    return m;
  }
  double s = 0.0;
  for (std::size_t n = 0; n < r.size(); ++n) {
    if (!std::isfinite(r[n])) throw PreconditionError("weighted_lp_norm: non-finite value");
    if (r[n] == 0.0) continue;
    s += std::pow(std::abs(r[n]), p) * w(grid.node(n));
  }
  return std::pow(s * grid.step(), 1.0 / p);
}

/// (int ||f(t)||^p |t|^gamma dt)^{1/p} by the midpoint rule; p = inf gives the
/// sup over nodes.
template <class V, class Norm = AbsNorm>
double weighted_lp_norm(const SampledFunction<V>& f, double p, const PowerWeight& w,
                        const Norm& norm = {}) {
  const auto r = detail::pointwise_norms(f, norm);
  return weighted_lp_norm_of(f.grid(), r, p, w);
}

/// sup_n t_n^mu ||f(t_n)|| on a half-line grid.
template <class V, class Norm = AbsNorm>
double cbmu_norm(const SampledFunction<V>& f, double mu, const Norm& norm = {}) {
  detail::require(f.size() > 0, "cbmu_norm: empty grid");
  detail::require(f.grid().is_half_line(), "cbmu_norm: needs a half-line grid");
  detail::require(mu >= 0.0, "cbmu_norm: mu must be >= 0");
  const auto r = detail::pointwise_norms(f, norm);
  double m = 0.0;
  for (std::size_t n = 0; n < r.size(); ++n) {
    const double t = f.grid().node(n);
    m = std::max(m, (mu == 0.0 ? 1.0 : std::pow(t, mu)) * r[n]);
  }
  return m;
}

}  // namespace tracelab::grid
