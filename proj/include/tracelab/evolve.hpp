#pragma once

// Spectral solver for u + K_alpha * (A u) = K_alpha * f with A = (-Laplace)^beta
// on a periodic box, and its maximal-regularity and trace report.

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tracelab/error.hpp"
#include "tracelab/fourier.hpp"
#include "tracelab/fraccalc.hpp"
#include "tracelab/grid.hpp"
#include "tracelab/spaces.hpp"

namespace tracelab::evolve {

using grid::Grid1D;
using grid::PowerWeight;
using spaces::cplx;
using spaces::FourierField;
using tracelab::detail::require;

/// Fourier multiplier mu_k = |2 pi k / L|^{2 beta}.
class SpectralOperator {
 public:
  SpectralOperator(const FourierField& geometry, double beta)
      : geometry_(geometry.dim(), geometry.modes(), geometry.length()), beta_(beta) {
    require(beta > 0.0 && std::isfinite(beta), "SpectralOperator: beta must be > 0");
    mu_.resize(geometry_.size());
    for (std::size_t i = 0; i < mu_.size(); ++i) {
      mu_[i] = std::pow(geometry_.frequency(i), 2.0 * beta);
    }
  }

  [[nodiscard]] const FourierField& geometry() const noexcept { return geometry_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }
  [[nodiscard]] std::size_t size() const noexcept { return mu_.size(); }
  [[nodiscard]] double multiplier(std::size_t idx) const noexcept { return mu_[idx]; }
  [[nodiscard]] const std::vector<double>& multipliers() const noexcept { return mu_; }

 private:
  FourierField geometry_;
  double beta_;
  std::vector<double> mu_;
};

/// Time samples of a Fourier field: modes[k][n] is the amplitude of mode k
/// at time node n.
class SpaceTimeField {
 public:
  SpaceTimeField(Grid1D time, const FourierField& geometry)
      : time_(std::move(time)),
        geometry_(geometry.dim(), geometry.modes(), geometry.length()),
        modes_(geometry_.size(), std::vector<cplx>(time_.count())) {}

  [[nodiscard]] const Grid1D& time() const noexcept { return time_; }
  [[nodiscard]] const FourierField& geometry() const noexcept { return geometry_; }
  [[nodiscard]] std::size_t mode_count() const noexcept { return modes_.size(); }
  [[nodiscard]] std::size_t time_count() const noexcept { return time_.count(); }
  [[nodiscard]] std::vector<cplx>& mode(std::size_t k) noexcept { return modes_[k]; }
  [[nodiscard]] const std::vector<cplx>& mode(std::size_t k) const noexcept { return modes_[k]; }

  /// The spatial field at time node n.
  [[nodiscard]] FourierField at(std::size_t n) const {
    FourierField u(geometry_.dim(), geometry_.modes(), geometry_.length());
    auto amps = u.amplitudes();
    for (std::size_t k = 0; k < modes_.size(); ++k) amps[k] = modes_[k][n];
    return u;
  }

  [[nodiscard]] bool is_zero() const noexcept {
    for (const auto& m : modes_) {
      for (const auto& v : m) {
        if (v != cplx{}) return false;
      }
    }
    return true;
  }

  [[nodiscard]] bool has_mean() const noexcept {
    for (std::size_t k = 0; k < modes_.size(); ++k) {
      if (geometry_.frequency(k) != 0.0) continue;
      for (const auto& v : modes_[k]) {
        if (v != cplx{}) return true;
      }
    }
    return false;
  }

 private:
  Grid1D time_;
  FourierField geometry_;
  std::vector<std::vector<cplx>> modes_;
};

struct VolterraProblem {
  double alpha = 0.5;
  SpectralOperator op;
  SpaceTimeField forcing;
  double gamma = 0.0;
  double p = 2.0;
  double q = 2.0;  // spatial integrability
  std::size_t starting = 3;  // starting weights of the time quadrature
  fraccalc::QuadratureRule rule = fraccalc::QuadratureRule::ProductMidpoint;

  [[nodiscard]] fraccalc::FracQuadrature quadrature() const {
    return {forcing.time(), alpha, fraccalc::starting_exponents(alpha, starting), rule};
  }

  void validate() const {
    require(alpha > 0.0 && alpha < 2.0, "VolterraProblem: alpha must lie in (0, 2)");
    require(p > 1.0 && std::isfinite(p), "VolterraProblem: p must lie in (1, inf)");
    require(q >= 1.0, "VolterraProblem: q must be >= 1");
    require(gamma >= 0.0 && gamma < p - 1.0, "VolterraProblem: gamma must lie in [0, p - 1)");
    require(forcing.geometry().same_geometry(op.geometry()),
            "VolterraProblem: forcing and operator geometries differ");
    require(forcing.time().origin() == 0.0, "VolterraProblem: time grid must start at 0");
    require(starting <= forcing.time_count(), "VolterraProblem: more starting weights than nodes");
  }
};

/// Solves u + mu Q[u] = Q[f] for one mode, Q the fractional-integral
/// quadrature.  The starting unknowns are coupled through the starting
/// weights and solved jointly; each later step is explicit in the history.
template <class T>
std::vector<T> volterra_solve_scalar(const fraccalc::FracQuadrature& q, double mu,
                                     const std::vector<T>& f) {
  require(mu >= 0.0, "volterra_solve: multiplier must be >= 0");
  const std::size_t n_nodes = q.grid().count();
  require(f.size() == n_nodes, "volterra_solve: length mismatch");
  const auto rhs = q.apply(f);
  std::vector<T> u(n_nodes, T{});
  if (mu == 0.0) return rhs;

  const double ta = q.tau_alpha();
  const auto& c = q.weights();
  const std::size_t k = q.start_count();
  if (k > 0) {
    std::vector<T> a(k * k, T{});
    std::vector<T> b(k);
    for (std::size_t n = 0; n < k; ++n) {
      for (std::size_t j = 0; j <= n; ++j) a[j * k + n] += mu * ta * c[n - j];
      for (std::size_t col = 0; col < k; ++col) a[col * k + n] += mu * q.start(n, col);
      a[n * k + n] += 1.0;
      b[n] = rhs[n];
    }
    fraccalc::detail::solve_dense(a, b, k, 1);
    for (std::size_t n = 0; n < k; ++n) u[n] = b[n];
  }
  const double diag = 1.0 + mu * ta * c[0];
  for (std::size_t n = k; n < n_nodes; ++n) {
    T hist{};
    for (std::size_t j = 0; j < n; ++j) hist += c[n - j] * u[j];
    hist *= ta;
    for (std::size_t col = 0; col < k; ++col) hist += q.start(n, col) * u[col];
    u[n] = (rhs[n] - mu * hist) / diag;
  }
  return u;
}

/// Mode-wise solution of u + K_alpha * A u = K_alpha * f with zero initial data.
inline SpaceTimeField volterra_solve(const VolterraProblem& prob) {
  prob.validate();
  const auto q = prob.quadrature();
  SpaceTimeField u(prob.forcing.time(), prob.forcing.geometry());
  for (std::size_t k = 0; k < u.mode_count(); ++k) {
    u.mode(k) = volterra_solve_scalar(q, prob.op.multiplier(k), prob.forcing.mode(k));
  }
  return u;
}

/// max_n ||u + Q[A u] - Q[f]|| / max_n ||f|| over modes and nodes.
inline double volterra_residual(const VolterraProblem& prob, const SpaceTimeField& u) {
  const auto q = prob.quadrature();
  double res = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < u.mode_count(); ++k) {
    const double mu = prob.op.multiplier(k);
    std::vector<cplx> au(u.mode(k));
    for (auto& v : au) v *= mu;
    const auto qa = q.apply(au);
    const auto qf = q.apply(prob.forcing.mode(k));
    for (std::size_t n = 0; n < qa.size(); ++n) {
      res = std::max(res, std::abs(u.mode(k)[n] + qa[n] - qf[n]));
      scale = std::max(scale, std::abs(prob.forcing.mode(k)[n]));
    }
  }
  return scale > 0.0 ? res / scale : res;
}

/// Per-node spatial L^q norms of a space-time field.
inline std::vector<double> spatial_norms(const SpaceTimeField& u, double q) {
  std::vector<double> r(u.time_count());
  for (std::size_t n = 0; n < r.size(); ++n) r[n] = spaces::lq_norm(u.at(n), q);
  return r;
}

/// ||u||_{L^p(w_gamma; L^q)}.
inline double space_time_norm(const SpaceTimeField& u, double p, double q, double gamma) {
  return grid::weighted_lp_norm_of(u.time(), spatial_norms(u, q), p, PowerWeight(gamma));
}

/// Mode-wise Grunwald-Letnikov derivative of order alpha in time.
inline SpaceTimeField time_derivative(const SpaceTimeField& u, double alpha) {
  SpaceTimeField d(u.time(), u.geometry());
  for (std::size_t k = 0; k < u.mode_count(); ++k) {
    const grid::SampledFunction<cplx> m(u.time(), u.mode(k));
    d.mode(k) = fraccalc::frac_derivative(m, alpha).values();
  }
  return d;
}

struct TraceEntry {
  int order = 0;          // time derivative j
  double delta = 0.0;     // exponent of sup_t ||d^j u(t)||
  double epsilon = 0.0;   // exponent of sup_t t^{gamma/p} ||d^j u(t)||
  double sup_norm = 0.0;
  double weighted_sup_norm = 0.0;
};

struct RegularityReport {
  double alpha = 0.0;
  double beta = 0.0;
  double p = 0.0;
  double q = 0.0;
  double gamma = 0.0;
  double derivative_norm = 0.0;  // ||d_t^alpha u||_{L^p(w_gamma; L^q)}
  double operator_norm = 0.0;    // ||A u||
  double forcing_norm = 0.0;     // ||f||
  double residual = 0.0;
  std::optional<TraceEntry> trace[2];  // j = 0, 1; absent when inadmissible

  /// (||d^alpha u|| + ||A u||) / ||f||, 0 for f = 0.
  [[nodiscard]] double maxreg_ratio() const noexcept {
    return forcing_norm > 0.0 ? (derivative_norm + operator_norm) / forcing_norm : 0.0;
  }
  [[nodiscard]] double ratio(double v) const noexcept {
    return forcing_norm > 0.0 ? v / forcing_norm : 0.0;
  }
};

/// Trace exponents for the j-th time derivative, absent unless
/// alpha > j + (1 + gamma)/p.
inline std::optional<std::pair<double, double>> trace_exponents(double alpha, double beta,
                                                                double p, double gamma, int j) {
  if (!(alpha > j + (1.0 + gamma) / p)) return std::nullopt;
  const double delta = 2.0 * beta * (1.0 - (1.0 + gamma) / (alpha * p) - j / alpha);
  const double eps = 2.0 * beta * (1.0 - 1.0 / (alpha * p) - j / alpha);
  return std::pair{delta, eps};
}

/// Maximal-regularity norms, plus the admissible trace entries when
/// trace_norms is set.
inline RegularityReport maxreg_trace_report(const VolterraProblem& prob, const SpaceTimeField& u,
                                            bool trace_norms = true) {
  prob.validate();
  require(u.time() == prob.forcing.time() && u.geometry().same_geometry(prob.forcing.geometry()),
          "maxreg_trace_report: solution does not match the problem");
  RegularityReport r;
  r.alpha = prob.alpha;
  r.beta = prob.op.beta();
  r.p = prob.p;
  r.q = prob.q;
  r.gamma = prob.gamma;

  SpaceTimeField au(u.time(), u.geometry());
  for (std::size_t k = 0; k < u.mode_count(); ++k) {
    au.mode(k) = u.mode(k);
    for (auto& v : au.mode(k)) v *= prob.op.multiplier(k);
  }
  r.derivative_norm = space_time_norm(time_derivative(u, prob.alpha), prob.p, prob.q, prob.gamma);
  r.operator_norm = space_time_norm(au, prob.p, prob.q, prob.gamma);
  r.forcing_norm = space_time_norm(prob.forcing, prob.p, prob.q, prob.gamma);
  r.residual = volterra_residual(prob, u);

  const spaces::LPFilterBank bank(u.geometry(), true);
  for (int j = 0; j < 2 && trace_norms; ++j) {
    const auto ex = trace_exponents(prob.alpha, prob.op.beta(), prob.p, prob.gamma, j);
    if (!ex) continue;
    if (u.has_mean()) {
      throw PreconditionError("maxreg_trace_report: homogeneous trace norms need mean-zero data");
    }
    const SpaceTimeField dj = j == 0 ? u : time_derivative(u, 1.0);
    TraceEntry e;
    e.order = j;
    e.delta = ex->first;
    e.epsilon = ex->second;
    for (std::size_t n = 0; n < dj.time_count(); ++n) {
      const auto field = dj.at(n);
      e.sup_norm = std::max(e.sup_norm, spaces::besov_norm(field, e.delta, prob.q, prob.p, bank));
      const double w = std::pow(u.time().node(n), prob.gamma / prob.p);
      e.weighted_sup_norm =
          std::max(e.weighted_sup_norm, w * spaces::besov_norm(field, e.epsilon, prob.q, prob.p, bank));
    }
    r.trace[j] = e;
  }
  return r;
}

}  // namespace tracelab::evolve
