#pragma once

// Real interpolation of diagonal sequence couples (l^q(w0), l^q(w1)) and the
// exponent bookkeeping of the trace and regularization theorems.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tracelab/error.hpp"

namespace tracelab::interp {

using tracelab::detail::require;

/// The couple (l^{q_c}(w0), l^{q_c}(w1)) on a shared finite index set.
class SequenceCouple {
 public:
  SequenceCouple(std::vector<double> w0, std::vector<double> w1, double qc = 2.0)
      : w0_(std::move(w0)), w1_(std::move(w1)), qc_(qc) {
    require(!w0_.empty(), "SequenceCouple: empty index set");
    require(w0_.size() == w1_.size(), "SequenceCouple: weight vectors differ in length");
    for (std::size_t n = 0; n < w0_.size(); ++n) {
      require(w0_[n] > 0.0 && std::isfinite(w0_[n]) && w1_[n] > 0.0 && std::isfinite(w1_[n]),
              "SequenceCouple: weights must be positive and finite (index " + std::to_string(n) +
                  ")");
    }
    require(qc >= 1.0 && std::isfinite(qc), "SequenceCouple: q_c must lie in [1, inf)");
  }

  [[nodiscard]] std::size_t size() const noexcept { return w0_.size(); }
  [[nodiscard]] double qc() const noexcept { return qc_; }
  [[nodiscard]] const std::vector<double>& w0() const noexcept { return w0_; }
  [[nodiscard]] const std::vector<double>& w1() const noexcept { return w1_; }

  /// ||x||_{X_i}.
  [[nodiscard]] double norm(int i, std::span<const double> x) const {
    check(x);
    const auto& w = i == 0 ? w0_ : w1_;
    double s = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) s += std::pow(w[n] * std::abs(x[n]), qc_);
    return std::pow(s, 1.0 / qc_);
  }

  void check(std::span<const double> x) const {
    require(x.size() == size(), "SequenceCouple: coordinate vector has wrong length");
    for (double v : x) require(std::isfinite(v), "SequenceCouple: non-finite coordinate");
  }

 private:
  std::vector<double> w0_;
  std::vector<double> w1_;
  double qc_;
};

/// (sum_n (min(w0_n, t w1_n) |x_n|)^{q_c})^{1/q_c}: the K-functional with the
/// coordinate-wise optimal split (exact for q_c = 1, within 2 otherwise).
inline double k_surrogate(const SequenceCouple& c, std::span<const double> x, double t) {
  c.check(x);
  require(t >= 0.0 && std::isfinite(t), "k_surrogate: t must be >= 0");
  double s = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    s += std::pow(std::min(c.w0()[n], t * c.w1()[n]) * std::abs(x[n]), c.qc());
  }
  return std::pow(s, 1.0 / c.qc());
}

namespace detail {

inline constexpr std::array<double, 4> kGaussX = {0.1834346424956498, 0.5255324099163290,
                                                  0.7966664774136267, 0.9602898564975363};
inline constexpr std::array<double, 4> kGaussW = {0.3626837833783620, 0.3137066458778873,
                                                  0.2223810344533745, 0.1012285362903763};

template <class Fn>
double gauss8(Fn&& fn, double a, double b) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < kGaussX.size(); ++i) {
    s += kGaussW[i] * (fn(c - r * kGaussX[i]) + fn(c + r * kGaussX[i]));
  }
  return s * r;
}

/// Breakpoints w0_n / w1_n of the coordinates with x_n != 0, sorted.
inline std::vector<double> breakpoints(const SequenceCouple& c, std::span<const double> x) {
  std::vector<double> r;
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (x[n] != 0.0) r.push_back(c.w0()[n] / c.w1()[n]);
  }
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

}  // namespace detail

/// ||x||_{(X_0,X_1)_{theta,p}} = (int_0^inf (t^{-theta} K(t,x))^p dt/t)^{1/p},
/// sup over t for p = inf.
///
/// Below the smallest breakpoint w0_n/w1_n the surrogate is t ||x||_{X_1}, above
/// the largest it is ||x||_{X_0}; both tails are integrated in closed form.
/// Between breakpoints the integrand is smooth in log t and is integrated by
/// 8-point Gauss-Legendre on panels no wider than ln 2.
inline double interp_norm(const SequenceCouple& c, std::span<const double> x, double theta,
                          double p) {
  c.check(x);
  require(theta > 0.0 && theta < 1.0, "interp_norm: theta must lie in (0, 1)");
  require(p >= 1.0, "interp_norm: p must lie in [1, inf]");
  const auto br = detail::breakpoints(c, x);
  if (br.empty()) return 0.0;
  const double x0 = c.norm(0, x);
  const double x1 = c.norm(1, x);
  const double panel = std::log(2.0);

  if (std::isinf(p)) {
    // t^{-theta} K is increasing below the first breakpoint and decreasing
    // above the last, so the sup sits in between.
    double m = std::max(std::pow(br.front(), 1.0 - theta) * x1, std::pow(br.back(), -theta) * x0);
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      const double a = std::log(br[i]);
      const double b = std::log(br[i + 1]);
      const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / panel * 8.0)));
      for (int k = 0; k <= pieces; ++k) {
        const double t = std::exp(a + (b - a) * k / pieces);
        m = std::max(m, std::pow(t, -theta) * k_surrogate(c, x, t));
      }
    }
    return m;
  }

  double s = std::pow(x1, p) * std::pow(br.front(), (1.0 - theta) * p) / ((1.0 - theta) * p) +
             std::pow(x0, p) * std::pow(br.back(), -theta * p) / (theta * p);
  const auto integrand = [&](double u) {
    const double t = std::exp(u);
    return std::pow(std::pow(t, -theta) * k_surrogate(c, x, t), p);
  };
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double a = std::log(br[i]);
    const double b = std::log(br[i + 1]);
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / panel)));
    for (int k = 0; k < pieces; ++k) {
      s += detail::gauss8(integrand, a + (b - a) * k / pieces, a + (b - a) * (k + 1) / pieces);
    }
  }
  return std::pow(s, 1.0 / p);
}

/// Value of the two terms of the mean-method functional
///   ||t^{xi_0} u_0||_{L^{p_0}(dt/t; X_0)} + ||t^{xi_1} u_1||_{L^{p_1}(dt/t; X_1)}
/// for the coordinate split u_0(t) = x on {t^{xi_1 - xi_0} >= w0_n / w1_n},
/// u_1 = x - u_0.  Each term is piecewise a power of t and is integrated
/// exactly.
struct MeanFunctional {
  double part0 = 0.0;
  double part1 = 0.0;
  [[nodiscard]] double total() const noexcept { return part0 + part1; }
};

inline MeanFunctional mean_method_functional(const SequenceCouple& c, std::span<const double> x,
                                             double xi0, double xi1, double p0, double p1) {
  c.check(x);
  require(xi0 * xi1 < 0.0, "mean_method_functional: need xi0 * xi1 < 0");
  require(p0 >= 1.0 && std::isfinite(p0) && p1 >= 1.0 && std::isfinite(p1),
          "mean_method_functional: p0, p1 must lie in [1, inf)");
  const double rate = xi1 - xi0;
  const double q = c.qc();

  // Thresholds in t at which a coordinate switches sides.
  struct Item {
    double t;
    double a0;  // (w0 |x|)^q
    double a1;  // (w1 |x|)^q
  };
  std::vector<Item> items;
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (x[n] == 0.0) continue;
    const double r = c.w0()[n] / c.w1()[n];
    items.push_back({std::pow(r, 1.0 / rate), std::pow(c.w0()[n] * std::abs(x[n]), q),
                     std::pow(c.w1()[n] * std::abs(x[n]), q)});
  }
  MeanFunctional out;
  if (items.empty()) return out;
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.t < b.t; });

  // int_a^b t^{e - 1} dt for e != 0, with a = 0 or b = inf allowed when the
  // integral converges.
  const auto power_integral = [](double a, double b, double e) {
    const double fb = std::isinf(b) ? 0.0 : std::pow(b, e);
    const double fa = a == 0.0 ? 0.0 : std::pow(a, e);
    return (fb - fa) / e;
  };

  // On (items[i-1].t, items[i].t) the coordinates 0..i-1 have crossed their
  // threshold.  When rate > 0 crossing means t >= threshold, i.e. the
  // coordinate sits in u_0; when rate < 0 it sits in u_1.
  double s0 = 0.0;
  double s1 = 0.0;
  double crossed0 = 0.0;
  double crossed1 = 0.0;
  double pending0 = 0.0;
  double pending1 = 0.0;
  for (const auto& it : items) {
    pending0 += it.a0;
    pending1 += it.a1;
  }
  for (std::size_t i = 0; i <= items.size(); ++i) {
    const double a = i == 0 ? 0.0 : items[i - 1].t;
    const double b = i == items.size() ? std::numeric_limits<double>::infinity() : items[i].t;
    if (b > a) {
      const double n0 = rate > 0 ? crossed0 : pending0;
      const double n1 = rate > 0 ? pending1 : crossed1;
      if (n0 > 0.0) s0 += std::pow(n0, p0 / q) * power_integral(a, b, xi0 * p0);
      if (n1 > 0.0) s1 += std::pow(n1, p1 / q) * power_integral(a, b, xi1 * p1);
    }
    if (i < items.size()) {
      crossed0 += items[i].a0;
      crossed1 += items[i].a1;
      pending0 -= items[i].a0;
      pending1 -= items[i].a1;
      if (pending0 < 0.0) pending0 = 0.0;
      if (pending1 < 0.0) pending1 = 0.0;
    }
  }
  out.part0 = std::pow(s0, 1.0 / p0);
  out.part1 = std::pow(s1, 1.0 / p1);
  return out;
}

/// Exponents of the trace theorem for F^{s0}_{p0}(w_{gamma0}; X_0) cap
/// F^{s1}_{p1}(w_{gamma1}; X_1) and trace order k.
struct TraceParams {
  double delta0 = 0.0;
  double delta1 = 0.0;
  int k = 0;
  double theta = 0.0;
  double p = 0.0;
};

inline TraceParams trace_params(double s0, double p0, double gamma0, double s1, double p1,
                                double gamma1, int k) {
  require(p0 > 1.0 && std::isfinite(p0) && p1 > 1.0 && std::isfinite(p1),
          "trace_params: p0, p1 must lie in (1, inf)");
  require(gamma0 > -1.0 && gamma1 > -1.0, "trace_params: weight exponents must be > -1");
  require(k >= 0, "trace_params: trace order must be >= 0");
  TraceParams tp;
  tp.k = k;
  tp.delta0 = s0 - (1.0 + gamma0) / p0;
  tp.delta1 = s1 - (1.0 + gamma1) / p1;
  if (!(tp.delta0 > k)) {
    throw HypothesisError("trace theorem needs s0 - (1 + gamma0)/p0 > k (got " +
                          std::to_string(tp.delta0) + " <= " + std::to_string(k) + ")");
  }
  if (!(tp.delta1 < k)) {
    throw HypothesisError("trace theorem needs s1 - (1 + gamma1)/p1 < k (got " +
                          std::to_string(tp.delta1) + " >= " + std::to_string(k) + ")");
  }
  tp.theta = (tp.delta0 - k) / (tp.delta0 - tp.delta1);
  tp.p = 1.0 / ((1.0 - tp.theta) / p0 + tp.theta / p1);
  return tp;
}

/// Exponents of the instantaneous-regularization theorem.
struct RegularizationParams {
  double beta0 = 0.0;
  double beta1 = 0.0;
  int k = 0;
  double eta = 0.0;
  double r = 0.0;
  double mu = 0.0;
};

inline RegularizationParams regularization_params(double s0, double p0, double gamma0, double s1,
                                                  double p1, double gamma1, int k) {
  require(p0 > 1.0 && std::isfinite(p0) && p1 > 1.0 && std::isfinite(p1),
          "regularization_params: p0, p1 must lie in (1, inf)");
  require(k >= 0, "regularization_params: order must be >= 0");
  if (gamma0 < 0.0 || gamma1 < 0.0) {
    throw HypothesisError("regularization theorem needs gamma0, gamma1 >= 0");
  }
  RegularizationParams rp;
  rp.k = k;
  rp.beta0 = s0 - 1.0 / p0;
  rp.beta1 = s1 - 1.0 / p1;
  if (!(rp.beta0 > k)) {
    throw HypothesisError("regularization theorem needs s0 - 1/p0 > k (got " +
                          std::to_string(rp.beta0) + ")");
  }
  if (!(rp.beta1 < k)) {
    throw HypothesisError("regularization theorem needs s1 - 1/p1 < k (got " +
                          std::to_string(rp.beta1) + ")");
  }
  rp.eta = (rp.beta0 - k) / (rp.beta0 - rp.beta1);
  rp.r = 1.0 / ((1.0 - rp.eta) / p0 + rp.eta / p1);
  rp.mu = (1.0 - rp.eta) * gamma0 / p0 + rp.eta * gamma1 / p1;
  return rp;
}

/// The couple (X_{theta0,p0}, X_{theta1,p1}) approximated diagonally: each
/// coordinate carries the interpolation norm of its unit vector.
inline SequenceCouple reiterated_couple(const SequenceCouple& c, double theta0, double p0,
                                        double theta1, double p1) {
  std::vector<double> om0(c.size());
  std::vector<double> om1(c.size());
  std::vector<double> e(c.size(), 0.0);
  for (std::size_t n = 0; n < c.size(); ++n) {
    e[n] = 1.0;
    om0[n] = interp_norm(c, e, theta0, p0);
    om1[n] = interp_norm(c, e, theta1, p1);
    e[n] = 0.0;
  }
  return {std::move(om0), std::move(om1), c.qc()};
}

}  // namespace tracelab::interp
