#pragma once

// Weighted Triebel-Lizorkin seminorms through difference means, and Besov /
// Bessel-potential norms through Fourier multipliers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tracelab/error.hpp"
#include "tracelab/fourier.hpp"
#include "tracelab/grid.hpp"

namespace tracelab::spaces {

using grid::DyadicLevels;
using grid::Grid1D;
using grid::PowerWeight;
using grid::SampledFunction;
using grid::ScalarFunction;

/// (s, p, q, gamma, m): smoothness, integrability, summability, weight
/// exponent and difference order of a weighted F^s_{p,q} space.
struct SpaceParams {
  double s = 0.5;
  double p = 2.0;
  double q = 2.0;
  double gamma = 0.0;
  int m = 1;

  /// Sobolev index s - (1 + gamma) / p.
  [[nodiscard]] double delta() const noexcept { return s - (1.0 + gamma) / p; }

  void validate() const {
    detail::require(std::isfinite(s), "SpaceParams: s must be finite");
    detail::require(p > 1.0 && std::isfinite(p), "SpaceParams: p must lie in (1, inf)");
    detail::require(q >= 1.0, "SpaceParams: q must lie in [1, inf]");
    detail::require(gamma > -1.0 && std::isfinite(gamma), "SpaceParams: gamma must be > -1");
    detail::require(m >= 1, "SpaceParams: difference order must be >= 1");
    detail::require(!(s > 0.0) || m > s, "SpaceParams: difference order must exceed s");
  }
};

namespace detail {

using tracelab::detail::require;

template <class V>
struct Linear {
  static V zero_like(const V&) { return V{}; }
  static void reset(V& acc) { acc = V{}; }
  static void axpy(V& acc, double c, const V& v) { acc += c * v; }
};

template <>
struct Linear<std::vector<double>> {
  static std::vector<double> zero_like(const std::vector<double>& v) {
    return std::vector<double>(v.size(), 0.0);
  }
  static void reset(std::vector<double>& acc) { std::fill(acc.begin(), acc.end(), 0.0); }
  static void axpy(std::vector<double>& acc, double c, const std::vector<double>& v) {
    require(acc.size() == v.size(), "difference_means: state dimension changes along the grid");
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += c * v[i];
  }
};

/// Largest number of h-nodes per difference-mean integral; the h-step is
/// doubled (staying a multiple of the grid step) until the count fits.
inline constexpr double kMaxHNodes = 512.0;

/// Evaluates t^{-1} int_V ||Delta_h^m f(x)|| dh node by node.
///
/// Shifted arguments are looked up at the nearest node and f is zero outside
/// the grid.  The h-range splits into the part where some shifted point hits
/// the support hull of f (trapezoid rule on a lattice of grid-step multiples,
/// so interior lookups are exact nodes) and the rest, where the integrand is
/// the constant ||f(x)|| and is added in closed form.
template <class V, class Norm>
class DifferenceEvaluator {
 public:
  DifferenceEvaluator(const SampledFunction<V>& f, int m, const Norm& norm)
      : f_(f), m_(m), norm_(norm), mag_(grid::detail::pointwise_norms(f, norm)) {
    require(m >= 1, "difference_means: order m must be >= 1");
    coeff_.resize(static_cast<std::size_t>(m) + 1);
    double c = 1.0;
    for (int j = 0; j <= m; ++j) {
      coeff_[j] = (j % 2 == 0 ? 1.0 : -1.0) * c;
      c = c * (m - j) / (j + 1);
    }
    const auto first = std::find_if(mag_.begin(), mag_.end(), [](double v) { return v != 0.0; });
    if (first == mag_.end()) return;
    const auto last = std::find_if(mag_.rbegin(), mag_.rend(), [](double v) { return v != 0.0; });
    const auto& g = f_.grid();
    lo_idx_ = static_cast<std::size_t>(first - mag_.begin());
    hi_idx_ = mag_.size() - 1 - static_cast<std::size_t>(last - mag_.rbegin());
    hull_lo_ = g.node(lo_idx_) - 0.5 * g.step();
    hull_hi_ = g.node(hi_idx_) + 0.5 * g.step();
    empty_ = false;
    acc_ = Linear<V>::zero_like(f_[lo_idx_]);
  }

  struct Parts {
    double numeric = 0.0;  // integral over the hull-meeting h-range
    double covered = 0.0;  // length of that range
    double total = 0.0;    // full integral over V
  };

  /// Scale beyond which the hull-meeting range at node n no longer grows.
  [[nodiscard]] double saturation(std::size_t n) const {
    if (empty_) return 0.0;
    const auto [a, b] = hull_range(n);
    return std::max(std::abs(a), std::abs(b));
  }

  [[nodiscard]] Parts parts(std::size_t n, double t) const {
    Parts out;
    if (empty_) return out;
    const auto& g = f_.grid();
    const double x = g.node(n);
    const double vlo = range_lo(x, t);
    const double vhi = t;
    const auto [a, b] = hull_range(n);
    const double c = std::max(vlo, a);
    const double d = std::min(vhi, b);
    if (d > c) {
      out.covered = d - c;
      out.numeric = trapezoid(n, x, c, d);
    }
    out.total = out.numeric + mag_[n] * ((vhi - vlo) - out.covered);
    return out;
  }

  /// Total integral at node n once t >= saturation(n), given the cached
  /// numeric part and covered length from any saturated scale.
  [[nodiscard]] double saturated_total(std::size_t n, double t, const Parts& cached) const {
    const double x = f_.grid().node(n);
    return cached.numeric + mag_[n] * ((t - range_lo(x, t)) - cached.covered);
  }

  [[nodiscard]] double magnitude(std::size_t n) const { return mag_[n]; }

 private:
  // Lower end of V(x, t): -t on the line, and on a half-line also the
  // constraint x + m h > origin.
  [[nodiscard]] double range_lo(double x, double t) const {
    const auto& g = f_.grid();
    if (!g.is_half_line()) return -t;
    return std::max(-t, (g.origin() - x) / m_);
  }

  // Smallest interval of h outside which every shifted point x + k h,
  // k = 1..m, misses the support hull.
  [[nodiscard]] std::pair<double, double> hull_range(std::size_t n) const {
    const double x = f_.grid().node(n);
    double a = 0.0;
    double b = 0.0;
    bool first = true;
    for (int k = 1; k <= m_; ++k) {
      const double p = (hull_lo_ - x) / k;
      const double q = (hull_hi_ - x) / k;
      if (first) {
        a = p;
        b = q;
        first = false;
      } else {
        a = std::min(a, p);
        b = std::max(b, q);
      }
    }
    return {a, b};
  }

  [[nodiscard]] const V* lookup_index(std::ptrdiff_t i) const {
    if (i < 0 || i >= static_cast<std::ptrdiff_t>(f_.size())) return nullptr;
    if (static_cast<std::size_t>(i) < lo_idx_ || static_cast<std::size_t>(i) > hi_idx_) {
      return nullptr;
    }
    return &f_[static_cast<std::size_t>(i)];
  }

  // ||Delta_h^m f(x)|| with shifted values at exact node offsets `k * shift`.
  [[nodiscard]] double diff_at_offset(std::ptrdiff_t n, std::ptrdiff_t shift) const {
    Linear<V>::reset(acc_);
    bool any = false;
    for (int j = 0; j <= m_; ++j) {
      if (const V* v = lookup_index(n + (m_ - j) * shift)) {
        Linear<V>::axpy(acc_, coeff_[j], *v);
        any = true;
      }
    }
    return any ? norm_(acc_) : 0.0;
  }

  // Same at an arbitrary h, shifted points resolved by nearest-node lookup.
  [[nodiscard]] double diff_at(double x, double h) const {
    Linear<V>::reset(acc_);
    bool any = false;
    const auto& g = f_.grid();
    for (int j = 0; j <= m_; ++j) {
      if (const V* v = lookup_index(g.nearest(x + (m_ - j) * h))) {
        Linear<V>::axpy(acc_, coeff_[j], *v);
        any = true;
      }
    }
    return any ? norm_(acc_) : 0.0;
  }

  [[nodiscard]] double trapezoid(std::size_t n, double x, double c, double d) const {
    const double tau = f_.grid().step();
    std::ptrdiff_t stride = 1;
    while ((d - c) / (tau * static_cast<double>(stride)) > kMaxHNodes) stride *= 2;
    const double delta = tau * static_cast<double>(stride);
    const auto first = static_cast<std::ptrdiff_t>(std::floor(c / delta)) + 1;
    const auto last = static_cast<std::ptrdiff_t>(std::ceil(d / delta)) - 1;
    const auto nn = static_cast<std::ptrdiff_t>(n);

    // One-sided values at the ends keep lookups at a boundary of V (such as
    // x + m h = origin) on the inner side.
    const double nudge = 1e-9 * tau;
    double sum = 0.0;
    double h_prev = c;
    double g_prev = diff_at(x, c + nudge);
    for (std::ptrdiff_t i = first; i <= last; ++i) {
      const double h = static_cast<double>(i) * delta;
      if (h <= c || h >= d) continue;
      const double gv = diff_at_offset(nn, i * stride);
      sum += 0.5 * (g_prev + gv) * (h - h_prev);
      h_prev = h;
      g_prev = gv;
    }
    const double gd = diff_at(x, d - nudge);
    sum += 0.5 * (g_prev + gd) * (d - h_prev);
    return sum;
  }

  const SampledFunction<V>& f_;
  int m_;
  const Norm& norm_;
  std::vector<double> mag_;
  std::vector<double> coeff_;
  std::size_t lo_idx_ = 0;
  std::size_t hi_idx_ = 0;
  double hull_lo_ = 0.0;
  double hull_hi_ = 0.0;
  bool empty_ = true;
  mutable V acc_{};
};

}  // namespace detail

/// d^m_t f(x) = t^{-1} int_{V(x,t)} ||Delta_h^m f(x)|| dh at every node x,
/// where V(x,t) = (-t, t) on the line and additionally x + m h > origin on a
/// half-line.  Scales t that are multiples of the grid step make every
/// shifted lookup land on a node.
template <class V, class Norm = grid::AbsNorm>
ScalarFunction difference_means(const SampledFunction<V>& f, int m, double t,
                                const Norm& norm = {}) {
  tracelab::detail::require(m >= 1, "difference_means: order m must be >= 1");
  tracelab::detail::require(t > 0.0 && std::isfinite(t), "difference_means: t must be > 0");
  if (t < f.grid().step()) {
    throw ResolutionError("difference_means: scale " + std::to_string(t) +
                          " is below the grid step " + std::to_string(f.grid().step()));
  }
  detail::DifferenceEvaluator<V, Norm> ev(f, m, norm);
  std::vector<double> out(f.size());
  for (std::size_t n = 0; n < f.size(); ++n) out[n] = ev.parts(n, t).total / t;
  return {f.grid(), std::move(out)};
}

struct SeminormOptions {
  /// Levels finer than the grid step are unresolvable.  When set, their
  /// contribution is extrapolated node-wise from the two finest resolved
  /// levels using the observed decay exponent (clamped to m); otherwise they
  /// are dropped.
  bool extrapolate_fine_tail = true;
};

struct SeminormResult {
  double value = 0.0;
  int levels_used = 0;       // levels evaluated on the grid
  int levels_truncated = 0;  // levels finer than the grid step
  int tail_nodes_dropped = 0;  // nodes whose decay exponent was too small to extrapolate
};

/// Dyadic seminorm || ( 2^{js} d^m_{kappa 2^{-j}} f )_j ||_{L^p(w_gamma; l^q)}:
/// the inner l^q over levels carries the ln 2 measure of each dyadic cell,
/// the outer weighted L^p uses the grid's midpoint rule.
template <class V, class Norm = grid::AbsNorm>
SeminormResult tl_seminorm(const SampledFunction<V>& f, const SpaceParams& sp,
                           const DyadicLevels& levels, const Norm& norm = {},
                           const SeminormOptions& opt = {}) {
  sp.validate();
  tracelab::detail::require(sp.s > 0.0, "tl_seminorm: smoothness must be > 0");
  const PowerWeight w(sp.gamma);
  const auto& g = f.grid();
  const std::size_t n_nodes = f.size();
  const bool sup = std::isinf(sp.q);
  const double ln2 = DyadicLevels::log_weight();

  detail::DifferenceEvaluator<V, Norm> ev(f, sp.m, norm);
  std::vector<double> sat(n_nodes);
  for (std::size_t n = 0; n < n_nodes; ++n) sat[n] = ev.saturation(n);
  std::vector<typename detail::DifferenceEvaluator<V, Norm>::Parts> cache(n_nodes);
  std::vector<char> cached(n_nodes, 0);

  auto means_at = [&](double t, std::vector<double>& d) {
    for (std::size_t n = 0; n < n_nodes; ++n) {
      if (t >= sat[n]) {
        if (!cached[n]) {
          cache[n] = ev.parts(n, t);
          cached[n] = 1;
          d[n] = cache[n].total / t;
        } else {
          d[n] = ev.saturated_total(n, t, cache[n]) / t;
        }
      } else {
        d[n] = ev.parts(n, t).total / t;
      }
    }
  };

  SeminormResult res;
  std::vector<double> acc(n_nodes, 0.0);
  std::vector<double> d(n_nodes);
  auto add_term = [&](std::size_t n, double term) {
    if (sup) {
      acc[n] = std::max(acc[n], term);
    } else {
      acc[n] += ln2 * std::pow(term, sp.q);
    }
  };

  // Coarse to fine so the saturation cache fills at the largest scale first.
  int j_finest = levels.j_min() - 1;
  std::vector<double> d_finest;
  std::vector<double> d_second;
  for (int j = levels.j_min(); j <= levels.j_max(); ++j) {
    const double t = levels.scale(j);
    if (t < g.step()) {
      ++res.levels_truncated;
      continue;
    }
    ++res.levels_used;
    means_at(t, d);
    const double ts = std::pow(t, -sp.s);
    for (std::size_t n = 0; n < n_nodes; ++n) add_term(n, ts * d[n]);
    d_second.swap(d_finest);
    d_finest = d;
    j_finest = j;
  }

  if (res.levels_truncated > 0 && opt.extrapolate_fine_tail) {
    // Finest resolvable level, possibly outside the window.
    int ja = j_finest;
    if (ja < levels.j_min()) {
      ja = static_cast<int>(std::floor(std::log2(levels.kappa() / g.step())));
      d_finest.assign(n_nodes, 0.0);
      means_at(levels.scale(ja), d_finest);
      d_second.clear();
    }
    if (d_second.empty()) {
      d_second.assign(n_nodes, 0.0);
      means_at(levels.scale(ja - 1), d_second);
    }
    const double ta = levels.scale(ja);
    for (std::size_t n = 0; n < n_nodes; ++n) {
      if (d_finest[n] <= 0.0) continue;
      double e = static_cast<double>(sp.m);
      if (d_second[n] > 0.0) e = std::min(e, std::log2(d_second[n] / d_finest[n]));
      if (!(e > sp.s)) {
        ++res.tail_nodes_dropped;
        continue;
      }
      for (int j = std::max(ja + 1, levels.j_min()); j <= levels.j_max(); ++j) {
        const int i = j - ja;
        const double tj = std::ldexp(ta, -i);
        add_term(n, std::pow(tj, -sp.s) * d_finest[n] * std::exp2(-i * e));
      }
    }
  }

  for (auto& a : acc) a = sup ? a : std::pow(a, 1.0 / sp.q);
  res.value = grid::weighted_lp_norm_of(g, acc, sp.p, w);
  return res;
}

/// (sum_k (2^{sk} ||S_k u||_{L^{q_space}})^{p_sum})^{1/p_sum}, sup for
/// p_sum = inf.  A homogeneous bank requires a field without k = 0 amplitude.
inline double besov_norm(const FourierField& u, double s, double q_space, double p_sum,
                         const LPFilterBank& bank) {
  tracelab::detail::require(bank.matches(u), "besov_norm: filter bank built for another geometry");
  tracelab::detail::require(q_space >= 1.0, "besov_norm: spatial exponent must be >= 1");
  tracelab::detail::require(p_sum >= 1.0, "besov_norm: summation exponent must be >= 1");
  if (bank.homogeneous()) {
    const auto amps = u.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
      if (u.frequency(i) == 0.0 && amps[i] != cplx{}) {
        throw PreconditionError("besov_norm: homogeneous norm of a field with nonzero mean");
      }
    }
  }
  const bool sup = std::isinf(p_sum);
  double acc = 0.0;
  for (std::size_t b = 0; b < bank.blocks().size(); ++b) {
    const double nk = lq_norm(bank.apply(u, b), q_space);
    if (nk == 0.0) continue;
    const double term = std::exp2(s * bank.blocks()[b]) * nk;
    acc = sup ? std::max(acc, term) : acc + std::pow(term, p_sum);
  }
  return sup ? acc : std::pow(acc, 1.0 / p_sum);
}

/// Averaged spatial norm || F^{-1}[(1 + |xi|^2)^{s/2} F u] ||_{L^p}.
inline double bessel_norm(const FourierField& u, double s, double p) {
  const auto v = u.multiplied([s](double xi) { return std::pow(1.0 + xi * xi, 0.5 * s); });
  return lq_norm(v, p);
}

/// Time-direction Bessel-potential norm of grid samples.  The samples are
/// extended by zero to the full line (a window `pad` times longer than the
/// grid, periodized), filtered by (1 + omega^2)^{s/2}, and measured in
/// L^p(w) on the original nodes.
inline double bessel_norm(const ScalarFunction& f, double s, double p, const PowerWeight& w,
                          int pad = 4) {
  tracelab::detail::require(pad >= 2, "bessel_norm: padding factor must be >= 2");
  const auto& g = f.grid();
  const int n = static_cast<int>(f.size());
  const int total = pad * n;
  std::vector<cplx> buf(static_cast<std::size_t>(total), cplx{});
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(f[i])) throw PreconditionError("bessel_norm: non-finite sample");
    buf[i] = f[i];
  }
  dft_inplace(buf, total, 1, FFTW_FORWARD);
  const double dw = 2.0 * std::numbers::pi / (g.step() * total);
  for (int k = 0; k < total; ++k) {
    const int ks = k <= total / 2 ? k : k - total;
    const double om = dw * ks;
    buf[k] *= std::pow(1.0 + om * om, 0.5 * s) / total;
  }
  dft_inplace(buf, total, 1, FFTW_BACKWARD);
  std::vector<double> r(f.size());
  for (int i = 0; i < n; ++i) r[i] = std::abs(buf[i]);
  return grid::weighted_lp_norm_of(g, r, p, w);
}

}  // namespace tracelab::spaces
