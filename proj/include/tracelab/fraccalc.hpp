#pragma once

// Fractional integrals and derivatives by Grunwald-Letnikov convolution
// quadrature, the Balakrishnan representation of fractional powers, the
// resolvent of d/dt, and the reflection extension from the half-line.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <type_traits>
#include <vector>

#include "tracelab/error.hpp"
#include "tracelab/grid.hpp"
#include "tracelab/mittag_leffler.hpp"

namespace tracelab::fraccalc {

using grid::Grid1D;
using grid::SampledFunction;
using grid::ScalarFunction;
using tracelab::detail::require;
using cplx = std::complex<double>;

/// Riemann-Liouville kernel t^{alpha-1} / Gamma(alpha) on t > 0.
class FracKernel {
 public:
  explicit FracKernel(double alpha) : alpha_(alpha), inv_gamma_(1.0 / std::tgamma(alpha)) {
    require(alpha > 0.0 && std::isfinite(alpha), "FracKernel: order must be > 0");
  }
  [[nodiscard]] double order() const noexcept { return alpha_; }
  [[nodiscard]] double operator()(double t) const noexcept {
    return t > 0.0 ? std::pow(t, alpha_ - 1.0) * inv_gamma_ : 0.0;
  }

 private:
  double alpha_;
  double inv_gamma_;
};

/// Coefficients of (1 - z)^order: w_0 = 1, w_j = w_{j-1} (j - 1 - order) / j.
/// A positive order gives the derivative weights, a negative one the
/// integral weights.
class GLWeights {
 public:
  GLWeights(double order, std::size_t n) : order_(order), w_(n) {
    require(std::isfinite(order), "GLWeights: order must be finite");
    if (n == 0) return;
    w_[0] = 1.0;
    for (std::size_t j = 1; j < n; ++j) {
      w_[j] = w_[j - 1] * (static_cast<double>(j) - 1.0 - order) / static_cast<double>(j);
    }
  }
  static GLWeights derivative(double alpha, std::size_t n) { return {alpha, n}; }
  static GLWeights integral(double alpha, std::size_t n) { return {-alpha, n}; }

  [[nodiscard]] double order() const noexcept { return order_; }
  [[nodiscard]] std::size_t size() const noexcept { return w_.size(); }
  [[nodiscard]] double operator[](std::size_t j) const noexcept { return w_[j]; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return w_; }

 private:
  double order_;
  std::vector<double> w_;
};

namespace detail {

inline void require_half_line(const Grid1D& g, const char* who) {
  if (g.origin() != 0.0) {
    throw PreconditionError(std::string(who) + ": needs a half-line grid starting at 0");
  }
}

/// Dense Gaussian elimination with partial pivoting; solves A X = B in place
/// for a column-major n x n matrix and n x r right-hand sides.
template <class T>
void solve_dense(std::vector<T>& a, std::vector<T>& b, std::size_t n, std::size_t r) {
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[k * n + i]) > std::abs(a[k * n + piv])) piv = i;
    }
    if (std::abs(a[k * n + piv]) == 0.0) throw Error("solve_dense: singular matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[j * n + k], a[j * n + piv]);
      for (std::size_t j = 0; j < r; ++j) std::swap(b[j * n + k], b[j * n + piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const T f = a[k * n + i] / a[k * n + k];
      if (f == T{}) continue;
      for (std::size_t j = k; j < n; ++j) a[j * n + i] -= f * a[j * n + k];
      for (std::size_t j = 0; j < r; ++j) b[j * n + i] -= f * b[j * n + k];
    }
  }
  for (std::size_t j = 0; j < r; ++j) {
    for (std::size_t ii = n; ii-- > 0;) {
      T s = b[j * n + ii];
      for (std::size_t c = ii + 1; c < n; ++c) s -= a[c * n + ii] * b[j * n + c];
      b[j * n + ii] = s / a[ii * n + ii];
    }
  }
}

}  // namespace detail

/// The exponents {i alpha + j : i, j >= 0} in increasing order, first `count`.
inline std::vector<double> starting_exponents(double alpha, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  std::vector<double> e;
  for (int i = 0; i <= 12; ++i) {
    for (int j = 0; j <= 12; ++j) e.push_back(i * alpha + j);
  }
  std::sort(e.begin(), e.end());
  for (double v : e) {
    if (out.empty() || v - out.back() > 1e-9) out.push_back(v);
    if (out.size() == count) break;
  }
  return out;
}

/// Base convolution weights of the fractional-integral quadrature.
///   GrunwaldLetnikov: coefficients of (1 - z)^{-alpha}; first order, and the
///     exact inverse of frac_derivative.
///   ProductMidpoint: each sample stands for its cell and the kernel is
///     integrated exactly over the cell, the last cell only up to its
///     midpoint; second order away from t = 0.
enum class QuadratureRule { GrunwaldLetnikov, ProductMidpoint };

inline std::vector<double> quadrature_weights(QuadratureRule rule, double alpha, std::size_t n) {
  if (rule == QuadratureRule::GrunwaldLetnikov) return GLWeights::integral(alpha, n).values();
  std::vector<double> c(n);
  const double g = std::tgamma(alpha + 1.0);
  if (n > 0) c[0] = std::pow(0.5, alpha) / g;
  for (std::size_t m = 1; m < n; ++m) {
    c[m] = (std::pow(m + 0.5, alpha) - std::pow(m - 0.5, alpha)) / g;
  }
  return c;
}

/// Fractional-integral quadrature on a half-line midpoint grid with starting
/// weights:
///   Q[g]_n = tau^alpha sum_{j<=n} c_{n-j} g_j + sum_{k<K} S_{n,k} g_k,
/// where S makes Q exact at every node for g(t) = t^beta, beta in the
/// starting exponents.  K = 0 gives the plain scheme.
class FracQuadrature {
 public:
  FracQuadrature(const Grid1D& g, double alpha, std::vector<double> exponents,
                 QuadratureRule rule = QuadratureRule::GrunwaldLetnikov)
      : grid_(g),
        alpha_(alpha),
        rule_(rule),
        c_(quadrature_weights(rule, alpha, g.count())),
        tau_alpha_(std::pow(g.step(), alpha)),
        beta_(std::move(exponents)) {
    detail::require_half_line(g, "FracQuadrature");
    require(alpha > 0.0 && std::isfinite(alpha), "FracQuadrature: order must be > 0");
    const std::size_t n_nodes = g.count();
    const std::size_t k = beta_.size();
    require(k <= n_nodes, "FracQuadrature: more starting weights than nodes");
    if (k == 0) return;

    // Scale-free form: with t_j = (j + 1/2) tau, every quantity for exponent
    // beta carries a factor tau^{beta + alpha} that cancels.
    std::vector<double> a(k * k);
    for (std::size_t col = 0; col < k; ++col) {
      for (std::size_t i = 0; i < k; ++i) a[col * k + i] = std::pow(col + 0.5, beta_[i]);
    }
    std::vector<double> rhs(k * n_nodes);
    std::vector<double> pw(n_nodes);
    for (std::size_t i = 0; i < k; ++i) {
      const double b = beta_[i];
      const double ratio = std::tgamma(b + 1.0) / std::tgamma(b + alpha + 1.0);
      for (std::size_t j = 0; j < n_nodes; ++j) pw[j] = std::pow(j + 0.5, b);
      for (std::size_t n = 0; n < n_nodes; ++n) {
        double s = 0.0;
        for (std::size_t j = 0; j <= n; ++j) s += c_[n - j] * pw[j];
        rhs[n * k + i] = ratio * std::pow(n + 0.5, b + alpha) - s;
      }
    }
    detail::solve_dense(a, rhs, k, n_nodes);
    start_.resize(k * n_nodes);
    for (std::size_t n = 0; n < n_nodes; ++n) {
      for (std::size_t col = 0; col < k; ++col) start_[n * k + col] = tau_alpha_ * rhs[n * k + col];
    }
  }

  /// Plain scheme, no starting weights.
  static FracQuadrature plain(const Grid1D& g, double alpha) { return {g, alpha, {}}; }
  /// Exact for t^beta with the first `count` exponents i alpha + j.
  static FracQuadrature corrected(const Grid1D& g, double alpha, std::size_t count = 3,
                                  QuadratureRule rule = QuadratureRule::GrunwaldLetnikov) {
    return {g, alpha, starting_exponents(alpha, count), rule};
  }

  [[nodiscard]] const Grid1D& grid() const noexcept { return grid_; }
  [[nodiscard]] double order() const noexcept { return alpha_; }
  [[nodiscard]] QuadratureRule rule() const noexcept { return rule_; }
  [[nodiscard]] double tau_alpha() const noexcept { return tau_alpha_; }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return c_; }
  [[nodiscard]] std::size_t start_count() const noexcept { return beta_.size(); }
  [[nodiscard]] const std::vector<double>& exponents() const noexcept { return beta_; }
  /// S_{n,k}.
  [[nodiscard]] double start(std::size_t n, std::size_t k) const noexcept {
    return start_[n * beta_.size() + k];
  }

  template <class T>
  [[nodiscard]] std::vector<T> apply(const std::vector<T>& g) const {
    require(g.size() == grid_.count(), "FracQuadrature: length mismatch");
    const std::size_t k = beta_.size();
    std::vector<T> out(g.size(), T{});
    for (std::size_t n = 0; n < g.size(); ++n) {
      T s{};
      for (std::size_t j = 0; j <= n; ++j) s += c_[n - j] * g[j];
      s *= tau_alpha_;
      for (std::size_t col = 0; col < k; ++col) s += start(n, col) * g[col];
      out[n] = s;
    }
    return out;
  }

 private:
  Grid1D grid_;
  double alpha_;
  QuadratureRule rule_;
  std::vector<double> c_;
  double tau_alpha_;
  std::vector<double> beta_;
  std::vector<double> start_;
};

/// (K_alpha * f)(t_n) ~ tau^alpha sum_{j<=n} c_j f(t_{n-j}), by default the
/// first-order Grunwald-Letnikov weights.  `starting > 0` adds starting
/// weights that make the quadrature exact for that many powers t^{i alpha + j}.
inline ScalarFunction frac_integral(const ScalarFunction& f, double alpha,
                                    std::size_t starting = 0,
                                    QuadratureRule rule = QuadratureRule::GrunwaldLetnikov) {
  require(alpha > 0.0 && std::isfinite(alpha), "frac_integral: order must be > 0");
  detail::require_half_line(f.grid(), "frac_integral");
  const FracQuadrature q(f.grid(), alpha, starting_exponents(alpha, starting), rule);
  return {f.grid(), q.apply(f.values())};
}

enum class Direction { Forward, Backward };

/// Grunwald-Letnikov derivative of order alpha in (0, 2):
/// forward tau^{-alpha} sum_j w_j f(t_{n-j}) (zero history before the grid),
/// backward tau^{-alpha} sum_j w_j f(t_{n+j}) (zero beyond the grid).
template <class T>
SampledFunction<T> frac_derivative(const SampledFunction<T>& f, double alpha,
                                   Direction dir = Direction::Forward) {
  require(alpha > 0.0 && alpha < 2.0, "frac_derivative: order must lie in (0, 2)");
  const std::size_t n_nodes = f.size();
  const GLWeights w = GLWeights::derivative(alpha, n_nodes);
  const double scale = std::pow(f.grid().step(), -alpha);
  std::vector<T> out(n_nodes, T{});
  for (std::size_t n = 0; n < n_nodes; ++n) {
    T s{};
    if (dir == Direction::Forward) {
      for (std::size_t j = 0; j <= n; ++j) s += w[j] * f[n - j];
    } else {
      for (std::size_t j = 0; n + j < n_nodes; ++j) s += w[j] * f[n + j];
    }
    out[n] = scale * s;
  }
  return {f.grid(), std::move(out)};
}

/// C_{s,m} = (int_0^inf (1 - e^{-t})^m t^{-1-s} dt)^{-1}, so that the
/// Balakrishnan integral reproduces e^{-x} as an eigenfunction with value 1.
/// Integrated by 8-point Gauss-Legendre on dyadic panels of t, with the
/// t^{m-1-s} germ at 0 and the t^{-1-s} tail handled in closed form.
inline double balakrishnan_constant(double s, int m) {
  require(s > 0.0 && s < 1.0, "balakrishnan_constant: s must lie in (0, 1)");
  require(m > s, "balakrishnan_constant: m must exceed s");
  static constexpr double gx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                   0.9602898564975363};
  static constexpr double gw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                   0.1012285362903763};
  const auto fn = [&](double t) { return std::pow(-std::expm1(-t), m) * std::pow(t, -1.0 - s); };
  const int j_lo = -40;
  const int j_hi = 7;
  // Below 2^{j_lo}: (1 - e^{-t})^m ~ t^m.
  const double t_lo = std::ldexp(1.0, j_lo);
  double total = std::pow(t_lo, m - s) / (m - s);
  for (int j = j_lo; j < j_hi; ++j) {
    const double a = std::ldexp(1.0, j);
    const double b = 2.0 * a;
    for (int piece = 0; piece < 4; ++piece) {
      const double pa = a + (b - a) * piece / 4.0;
      const double pb = a + (b - a) * (piece + 1) / 4.0;
      const double c = 0.5 * (pa + pb);
      const double r = 0.5 * (pb - pa);
      double acc = 0.0;
      for (int i = 0; i < 4; ++i) acc += gw[i] * (fn(c - r * gx[i]) + fn(c + r * gx[i]));
      total += acc * r;
    }
  }
  // Beyond 2^{j_hi} = 128: (1 - e^{-t})^m = 1 to double precision.
  total += std::pow(std::ldexp(1.0, j_hi), -s) / s;
  return 1.0 / total;
}

/// C_{s,m} int_0^inf t^{-1-s} ((I - L_t)^m f)(x) dt with (L_t f)(x) = f(x + t)
/// and f zero beyond the grid.  The shift t runs over multiples of the grid
/// step so all lookups are exact nodes; between them the integrand is
/// interpolated linearly and integrated against t^{-1-s} exactly.  Once every
/// shifted point has left the grid the integrand is f(x) and the tail is
/// added in closed form.
inline ScalarFunction balakrishnan_derivative(const ScalarFunction& f, double s, int m) {
  require(s > 0.0 && s < 1.0, "balakrishnan_derivative: s must lie in (0, 1)");
  require(m > s, "balakrishnan_derivative: m must exceed s");
  const double cst = balakrishnan_constant(s, m);
  const double tau = f.grid().step();
  const auto n_nodes = static_cast<std::ptrdiff_t>(f.size());
  std::vector<double> binom(static_cast<std::size_t>(m) + 1);
  binom[0] = 1.0;
  for (int j = 1; j <= m; ++j) binom[j] = binom[j - 1] * (m - j + 1) / j;

  std::vector<double> out(f.size());
  for (std::ptrdiff_t n = 0; n < n_nodes; ++n) {
    const double fx = f[static_cast<std::size_t>(n)];
    const auto g = [&](std::ptrdiff_t k) {
      double v = 0.0;
      for (int j = 0; j <= m; ++j) {
        const std::ptrdiff_t idx = n + j * k;
        if (idx < n_nodes) v += ((j % 2) ? -binom[j] : binom[j]) * f[static_cast<std::size_t>(idx)];
      }
      return v;
    };
    // First cell: g(t) ~ g(tau) t / tau.
    double sum = g(1) * std::pow(tau, -s) / (1.0 - s);
    const std::ptrdiff_t k_end = n_nodes - n;  // g(k_end tau) = f(x)
    double g_prev = g(1);
    for (std::ptrdiff_t k = 1; k < k_end; ++k) {
      const double a = static_cast<double>(k) * tau;
      const double b = a + tau;
      const double g_next = g(k + 1);
      const double i0 = (std::pow(a, -s) - std::pow(b, -s)) / s;
      const double i1 = (std::pow(b, 1.0 - s) - std::pow(a, 1.0 - s)) / (1.0 - s);
      sum += (g_prev * (b * i0 - i1) + g_next * (i1 - a * i0)) / tau;
      g_prev = g_next;
    }
    sum += fx * std::pow(static_cast<double>(std::max<std::ptrdiff_t>(k_end, 1)) * tau, -s) / s;
    out[static_cast<std::size_t>(n)] = cst * sum;
  }
  return {f.grid(), std::move(out)};
}

/// y(t) = int_0^t e^{-lambda (t - s)} f(s) ds on a half-line midpoint grid.
///
/// The first half cell is a backward-Euler step, later cells the
/// trapezoidal (Crank-Nicolson) rule.  The scheme is y = (B^{-1} D + lambda)^{-1} f
/// for fixed matrices D, B, so the discrete resolvent identity holds exactly.
template <class T, class L>
SampledFunction<T> resolvent_apply(const SampledFunction<T>& f, L lambda) {
  detail::require_half_line(f.grid(), "resolvent_apply");
  if (std::real(lambda) < 0.0) throw PreconditionError("resolvent_apply: need Re lambda >= 0");
  const double tau = f.grid().step();
  std::vector<T> y(f.size());
  const T lam = static_cast<T>(lambda);
  y[0] = f[0] / (T(2.0 / tau) + lam);
  const T a = T(1.0 / tau) - lam * 0.5;
  const T b = T(1.0 / tau) + lam * 0.5;
  for (std::size_t n = 1; n < f.size(); ++n) {
    y[n] = (a * y[n - 1] + 0.5 * (f[n] + f[n - 1])) / b;
  }
  return {f.grid(), std::move(y)};
}

/// Reflection coefficients b_j, nodes lambda_j = j (j = 1..m+1), with
/// sum_j b_j (-lambda_j)^k = 1 for k = 0..m.
class ExtensionCoeffs {
 public:
  static constexpr int kMaxOrder = 4;

  explicit ExtensionCoeffs(int m) : m_(m) {
    require(m >= 0 && m <= kMaxOrder, "ExtensionCoeffs: order must lie in [0, 4]");
    // b_j is the Lagrange basis polynomial for nodes -lambda_i evaluated at
    // 1: prod_{i != j} (1 + lambda_i) / (lambda_i - lambda_j), an integer
    // ratio computed exactly.
    for (int j = 1; j <= m + 1; ++j) {
      long long num = 1;
      long long den = 1;
      for (int i = 1; i <= m + 1; ++i) {
        if (i == j) continue;
        num *= (1 + i);
        den *= (i - j);
      }
      lambda_.push_back(j);
      b_.push_back(static_cast<double>(num) / static_cast<double>(den));
    }
  }

  [[nodiscard]] int order() const noexcept { return m_; }
  [[nodiscard]] const std::vector<double>& nodes() const noexcept { return lambda_; }
  [[nodiscard]] const std::vector<double>& coeffs() const noexcept { return b_; }

 private:
  int m_;
  std::vector<double> lambda_;
  std::vector<double> b_;
};

struct ExtensionResult {
  ScalarFunction function;
  std::size_t padded_nodes = 0;  // negative nodes that needed f beyond the grid
};

/// Extension to the full line: f on t > 0 and sum_j b_j f(lambda_j |t|) on
/// t < 0.  The mirrored evaluation points lambda_j |t| are generally not
/// nodes; f is read there by local Lagrange interpolation through m + 2
/// nodes, which reproduces polynomials up to degree m + 1 exactly.  Points
/// beyond the grid read zero and are counted in `padded_nodes`.
inline ExtensionResult extension_operator(const ScalarFunction& f, int m) {
  const ExtensionCoeffs ec(m);
  const auto& g = f.grid();
  detail::require_half_line(g, "extension_operator");
  const std::size_t n_nodes = f.size();
  const std::size_t width = std::min<std::size_t>(static_cast<std::size_t>(m) + 2, n_nodes);

  const auto interpolate = [&](double t, bool& padded) {
    const double pos = t / g.step() - 0.5;  // fractional node index
    if (pos > static_cast<double>(n_nodes - 1) + 1e-9) {
      padded = true;
      return 0.0;
    }
    auto first = static_cast<std::ptrdiff_t>(std::floor(pos)) -
                 static_cast<std::ptrdiff_t>((width - 1) / 2);
    first = std::clamp<std::ptrdiff_t>(first, 0, static_cast<std::ptrdiff_t>(n_nodes - width));
    double v = 0.0;
    for (std::size_t i = 0; i < width; ++i) {
      const double xi = static_cast<double>(first) + static_cast<double>(i);
      double li = 1.0;
      for (std::size_t k = 0; k < width; ++k) {
        if (k == i) continue;
        const double xk = static_cast<double>(first) + static_cast<double>(k);
        li *= (pos - xk) / (xi - xk);
      }
      v += li * f[static_cast<std::size_t>(first) + i];
    }
    return v;
  };

  const Grid1D full(-g.end(), g.step(), 2 * n_nodes);
  std::vector<double> out(2 * n_nodes);
  ExtensionResult res{ScalarFunction(full, std::vector<double>(2 * n_nodes)), 0};
  for (std::size_t n = 0; n < n_nodes; ++n) {
    out[n_nodes + n] = f[n];
    const double t = g.node(n);
    bool padded = false;
    double v = 0.0;
    for (std::size_t j = 0; j < ec.coeffs().size(); ++j) {
      v += ec.coeffs()[j] * interpolate(ec.nodes()[j] * t, padded);
    }
    out[n_nodes - 1 - n] = v;
    if (padded) ++res.padded_nodes;
  }
  res.function = ScalarFunction(full, std::move(out));
  return res;
}

}  // namespace tracelab::fraccalc
