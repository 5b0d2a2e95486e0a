#pragma once

// Monte-Carlo simulation of du + A u dt = G dW on a periodic box, mode by
// mode as exact Ornstein-Uhlenbeck processes, and weighted moment estimates
// of the solution.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tracelab/error.hpp"
#include "tracelab/evolve.hpp"
#include "tracelab/fourier.hpp"
#include "tracelab/fraccalc.hpp"
#include "tracelab/grid.hpp"
#include "tracelab/rng.hpp"
#include "tracelab/spaces.hpp"

namespace tracelab::stoch {

using evolve::SpectralOperator;
using grid::Grid1D;
using grid::PowerWeight;
using spaces::cplx;
using spaces::FourierField;
using tracelab::detail::require;

/// Modes are real amplitudes in the orthonormal basis 1, sqrt2 cos(k.x)
/// (first nonzero entry of k positive) and sqrt2 sin(k.x) (negative), indexed
/// like FourierField.  g[idx] is the noise amplitude on that basis function.
struct StochProblem {
  SpectralOperator op;
  std::vector<double> g;
  Grid1D time;
  double p = 4.0;
  double a = 0.0;
  double q = 2.0;  // spatial integrability
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  bool diagnostic = false;  // admits p = 2, a = 0

  void validate() const {
    require(g.size() == op.size(), "StochProblem: one noise amplitude per mode required");
    for (double v : g) require(std::isfinite(v), "StochProblem: noise amplitudes must be finite");
    require(time.origin() == 0.0, "StochProblem: time grid must start at 0");
    require(paths >= 2, "StochProblem: at least two paths required");
    require(q >= 1.0, "StochProblem: q must be >= 1");
    if (diagnostic && p == 2.0) {
      require(a == 0.0, "StochProblem: diagnostic p = 2 requires a = 0");
    } else {
      require(p > 2.0 && std::isfinite(p), "StochProblem: p must lie in (2, inf)");
      require(a >= 0.0 && a < 0.5 * p - 1.0, "StochProblem: a must lie in [0, p/2 - 1)");
    }
  }
};

/// Real basis amplitudes of every path at every node, for the modes with
/// nonzero noise only.
class Ensemble {
 public:
  Ensemble(Grid1D time, std::vector<std::size_t> active, std::size_t paths)
      : time_(std::move(time)),
        active_(std::move(active)),
        paths_(paths),
        data_(paths * active_.size() * time_.count()) {}

  [[nodiscard]] const Grid1D& time() const noexcept { return time_; }
  [[nodiscard]] const std::vector<std::size_t>& active_modes() const noexcept { return active_; }
  [[nodiscard]] std::size_t paths() const noexcept { return paths_; }
  /// Samples of active mode number m (not the mode index) on path `path`.
  [[nodiscard]] double* series(std::size_t path, std::size_t m) noexcept {
    return data_.data() + (path * active_.size() + m) * time_.count();
  }
  [[nodiscard]] const double* series(std::size_t path, std::size_t m) const noexcept {
    return data_.data() + (path * active_.size() + m) * time_.count();
  }

 private:
  Grid1D time_;
  std::vector<std::size_t> active_;
  std::size_t paths_;
  std::vector<double> data_;
};

namespace detail {

/// Standard deviation of the OU increment over a step h.
inline double ou_sigma(double mu, double h) {
  if (mu * h < 1e-8) return std::sqrt(h * (1.0 - mu * h));
  return std::sqrt(-std::expm1(-2.0 * mu * h) / (2.0 * mu));
}

}  // namespace detail

/// u(0) = 0; exact transitions u <- e^{-mu h} u + g sigma(h) xi, first to the
/// midpoint node tau/2, then in steps tau.  xi is keyed by (seed, path, mode,
/// step), so the result does not depend on evaluation order.
inline Ensemble simulate_ensemble(const StochProblem& prob) {
  prob.validate();
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < prob.g.size(); ++i) {
    if (prob.g[i] != 0.0) active.push_back(i);
  }
  Ensemble ens(prob.time, active, prob.paths);
  const std::size_t n_nodes = prob.time.count();
  const double tau = prob.time.step();
  for (std::size_t m = 0; m < active.size(); ++m) {
    const std::size_t idx = active[m];
    const double mu = prob.op.multiplier(idx);
    const double g = prob.g[idx];
    const double sig0 = g * detail::ou_sigma(mu, 0.5 * tau);
    const double decay = std::exp(-mu * tau);
    const double sig = g * detail::ou_sigma(mu, tau);
    for (std::size_t path = 0; path < prob.paths; ++path) {
      double* u = ens.series(path, m);
      const auto key = [&](std::size_t step) {
        return rng::normal(prob.seed, static_cast<std::uint32_t>(path),
                           static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(step));
      };
      u[0] = sig0 * key(0);
      for (std::size_t n = 1; n < n_nodes; ++n) u[n] = decay * u[n - 1] + sig * key(n);
    }
  }
  return ens;
}

struct EnsembleStats {
  std::string name;
  double theta = 0.0;  // fractional time order, where meaningful
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t paths = 0;
};

/// Mean and standard error of per-path values.
inline EnsembleStats summarize(std::string name, const std::vector<double>& x, double scale = 1.0) {
  EnsembleStats s;
  s.name = std::move(name);
  s.paths = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size() - 1);
  s.mean = mean * scale;
  s.std_error = std::sqrt(var / static_cast<double>(x.size())) * scale;
  return s;
}

/// Spatial field of one path at node n: complex amplitudes from the real
/// basis, each amplitude multiplied by `weight[m]`.
inline FourierField path_field(const FourierField& geom, const Ensemble& ens, std::size_t path,
                               std::size_t n, const std::vector<double>& weight,
                               const std::vector<const double*>* series = nullptr) {
  FourierField u(geom.dim(), geom.modes(), geom.length());
  auto amps = u.amplitudes();
  const double r = 1.0 / std::sqrt(2.0);
  for (std::size_t m = 0; m < ens.active_modes().size(); ++m) {
    const std::size_t idx = ens.active_modes()[m];
    const double v = weight[m] * (series ? (*series)[m][n] : ens.series(path, m)[n]);
    const auto k = geom.wavenumber(idx);
    if (k[0] == 0 && k[1] == 0) {
      amps[idx] += v;
      continue;
    }
    const bool cosine = k[0] > 0 || (k[0] == 0 && k[1] > 0);
    const auto mirror = geom.index({-k[0], -k[1]});
    if (cosine) {
      amps[idx] += v * r;
      amps[mirror] += v * r;
    } else {
      // sqrt2 sin(k'.x) with k' = -k: (e^{ik'x} - e^{-ik'x}) / (i sqrt2).
      amps[mirror] += cplx(0.0, -v * r);
      amps[idx] += cplx(0.0, v * r);
    }
  }
  return u;
}

struct SmrOptions {
  std::vector<double> thetas{0.0, 0.1, 0.25, 0.4};
  bool trace_norms = true;
};

struct SmrReport {
  double noise_norm = 0.0;  // ||G||^p_{L^p(w_a)}
  std::vector<EnsembleStats> stats;
  bool trace_skipped = false;  // noise on the mean mode
};

/// Monte-Carlo estimates of E||d_t^theta A^{1/2 - theta} u||^p_{L^p(w_a; L^q)}
/// and of the p-th moments of the trace norms, each divided by ||G||^p.
/// The trace norms are homogeneous Besov norms with smoothness
/// 2 beta (1/2 - (1 + a)/p) for the plain sup and 2 beta (1/2 - 1/p) for the
/// t^{a/p}-weighted sup; they are skipped when the mean mode carries noise.
inline SmrReport smr_report(const StochProblem& prob, const Ensemble& ens,
                            const SmrOptions& opt = {}) {
  prob.validate();
  for (double th : opt.thetas) {
    require(th >= 0.0 && th < 0.5, "smr_report: theta must lie in [0, 1/2)");
  }
  const auto& tg = ens.time();
  const std::size_t n_nodes = tg.count();
  const auto& active = ens.active_modes();
  const FourierField& geom = prob.op.geometry();
  const PowerWeight w(prob.a);

  SmrReport rep;
  double g2 = 0.0;
  for (double v : prob.g) g2 += v * v;
  {
    const std::vector<double> gn(n_nodes, std::sqrt(g2));
    rep.noise_norm = std::pow(grid::weighted_lp_norm_of(tg, gn, prob.p, w), prob.p);
  }
  const double scale = rep.noise_norm > 0.0 ? 1.0 / rep.noise_norm : 0.0;
  const bool l2 = prob.q == 2.0;

  for (double th : opt.thetas) {
    std::vector<double> weight(active.size());
    for (std::size_t m = 0; m < active.size(); ++m) {
      const double mu = prob.op.multiplier(active[m]);
      weight[m] = std::pow(mu, 0.5 - th);
    }
    const fraccalc::GLWeights gl = fraccalc::GLWeights::derivative(th, n_nodes);
    const double tscale = std::pow(tg.step(), -th);
    std::vector<double> x(ens.paths());
    std::vector<std::vector<double>> deriv(active.size(), std::vector<double>(n_nodes));
    std::vector<const double*> ptrs(active.size());
    std::vector<double> norms(n_nodes);
    for (std::size_t path = 0; path < ens.paths(); ++path) {
      for (std::size_t m = 0; m < active.size(); ++m) {
        const double* u = ens.series(path, m);
        auto& d = deriv[m];
        if (th == 0.0) {
          for (std::size_t n = 0; n < n_nodes; ++n) d[n] = u[n];
        } else {
          for (std::size_t n = 0; n < n_nodes; ++n) {
            double s = 0.0;
            for (std::size_t j = 0; j <= n; ++j) s += gl[j] * u[n - j];
            d[n] = tscale * s;
          }
        }
        ptrs[m] = d.data();
      }
      for (std::size_t n = 0; n < n_nodes; ++n) {
        if (l2) {
          double s = 0.0;
          for (std::size_t m = 0; m < active.size(); ++m) s += std::pow(weight[m] * ptrs[m][n], 2);
          norms[n] = std::sqrt(s);
        } else {
          norms[n] = spaces::lq_norm(path_field(geom, ens, path, n, weight, &ptrs), prob.q);
        }
      }
      x[path] = std::pow(grid::weighted_lp_norm_of(tg, norms, prob.p, w), prob.p);
    }
    auto st = summarize("maxreg", x, scale);
    st.theta = th;
    rep.stats.push_back(st);
  }

  if (!opt.trace_norms) return rep;
  for (std::size_t m = 0; m < active.size(); ++m) {
    if (prob.op.multiplier(active[m]) == 0.0) rep.trace_skipped = true;
  }
  if (rep.trace_skipped) return rep;

  const double beta = prob.op.beta();
  const double s_plain = 2.0 * beta * (0.5 - (1.0 + prob.a) / prob.p);
  const double s_weighted = 2.0 * beta * (0.5 - 1.0 / prob.p);
  const spaces::LPFilterBank bank(geom, true);
  const std::vector<double> ones(active.size(), 1.0);
  std::vector<double> x_plain(ens.paths());
  std::vector<double> x_weighted(ens.paths());
  for (std::size_t path = 0; path < ens.paths(); ++path) {
    double sup_plain = 0.0;
    double sup_weighted = 0.0;
    for (std::size_t n = 0; n < n_nodes; ++n) {
      const auto field = path_field(geom, ens, path, n, ones);
      sup_plain = std::max(sup_plain, spaces::besov_norm(field, s_plain, prob.q, prob.p, bank));
      const double tw = std::pow(tg.node(n), prob.a / prob.p);
      sup_weighted =
          std::max(sup_weighted, tw * spaces::besov_norm(field, s_weighted, prob.q, prob.p, bank));
    }
    x_plain[path] = std::pow(sup_plain, prob.p);
    x_weighted[path] = std::pow(sup_weighted, prob.p);
  }
  rep.stats.push_back(summarize("trace_sup", x_plain, scale));
  rep.stats.push_back(summarize("trace_weighted_sup", x_weighted, scale));
  return rep;
}

}  // namespace tracelab::stoch
