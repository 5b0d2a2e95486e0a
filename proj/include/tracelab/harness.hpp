#pragma once

// Seeded test families of tensor members u(t) = phi(t) x and the empirical
// checks of the trace, embedding and interpolation inequalities over them.
//
// Every member is a product of a scalar time profile and a real band-limited
// Fourier field, so each vector-valued norm factors into a scalar norm of the
// profile times a norm of the coordinate sequence |x_k|.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tracelab/error.hpp"
#include "tracelab/fourier.hpp"
#include "tracelab/grid.hpp"
#include "tracelab/interp.hpp"
#include "tracelab/rng.hpp"
#include "tracelab/spaces.hpp"

namespace tracelab::harness {

using tracelab::detail::require;
using grid::Grid1D;
using grid::ScalarFunction;
using spaces::cplx;
using spaces::FourierField;
using spaces::SpaceParams;

enum class FamilyKind { BandLimited, ScaledBump, Tensor };

enum class ProfileShape {
  Bump,          // (1 - (t/w)^2)^4 on [0, w)
  Taper,         // (1 - t/w)^4 on [0, w)
  Exponential,   // exp(-t/w)
  Indicator,     // 1 on (0, w)
  RandomCosine,  // (sum_j a_j cos(j pi t / w))^2 (1 - (t/w)^2)^3 on [0, w)
};

/// Nonnegative scalar time profile.
struct TimeProfile {
  ProfileShape shape = ProfileShape::Bump;
  double width = 1.0;
  std::vector<double> coeffs;  // RandomCosine only, a_0 first

  [[nodiscard]] double operator()(double t) const {
    const double r = t / width;
    if (t < 0.0) return 0.0;
    switch (shape) {
      case ProfileShape::Bump:
        return r < 1.0 ? std::pow(1.0 - r * r, 4) : 0.0;
      case ProfileShape::Taper:
        return r < 1.0 ? std::pow(1.0 - r, 4) : 0.0;
      case ProfileShape::Exponential:
        return std::exp(-r);
      case ProfileShape::Indicator:
        return r < 1.0 ? 1.0 : 0.0;
      case ProfileShape::RandomCosine: {
        if (r >= 1.0) return 0.0;
        double s = 0.0;
        for (std::size_t j = 0; j < coeffs.size(); ++j) {
          s += coeffs[j] * std::cos(static_cast<double>(j) * std::numbers::pi * r);
        }
        return s * s * std::pow(1.0 - r * r, 3);
      }
    }
    return 0.0;
  }

  /// Length beyond which the profile vanishes (below 1e-7 for the exponential).
  [[nodiscard]] double support() const noexcept {
    return shape == ProfileShape::Exponential ? 16.0 * width : width;
  }
};

struct FamilySpec {
  FamilyKind kind = FamilyKind::Tensor;
  std::uint64_t seed = 1;
  std::size_t size = 10;  // base members
  ProfileShape profile = ProfileShape::Bump;  // ScaledBump and Tensor
  double width_min = 0.5;
  double width_max = 2.0;
  int band = 8;          // spatial modes 1 <= |k| <= band
  double decay = 1.0;    // |x_k| ~ k^{-decay}
  int terms = 4;         // cosine terms of BandLimited profiles
  int lambda_min = -3;   // ScaledBump: lambda = 2^j, lambda_min <= j <= lambda_max
  int lambda_max = 3;

  void validate() const {
    require(size >= 1, "gen_family: empty family (size must be >= 1)");
    require(width_min > 0.0 && width_min <= width_max && std::isfinite(width_max),
            "gen_family: empty width range");
    require(band >= 1, "gen_family: band must be >= 1");
    require(std::isfinite(decay), "gen_family: decay must be finite");
    require(terms >= 1, "gen_family: terms must be >= 1");
    require(lambda_min <= lambda_max, "gen_family: empty dilation range");
  }
};

namespace detail {

inline double uniform(std::uint64_t seed, std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  const auto r = rng::philox4x32({a, b, c, 1u}, rng::key_from_seed(seed));
  return rng::to_open_unit(r[0], r[1]);
}

/// Composite 8-point Gauss-Legendre on [a, b] with `panels` pieces between
/// consecutive breakpoints.
template <class Fn>
double integrate(Fn&& fn, double a, double b, const std::vector<double>& breaks, int panels) {
  std::vector<double> pts{a};
  for (double x : breaks) {
    if (x > a && x < b) pts.push_back(x);
  }
  pts.push_back(b);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double h = (pts[i + 1] - pts[i]) / panels;
    for (int k = 0; k < panels; ++k) {
      s += interp::detail::gauss8(fn, pts[i] + k * h, pts[i] + (k + 1) * h);
    }
  }
  return s;
}

}  // namespace detail

/// u(t) = scale * phi(lambda t) * x, with x given by its amplitudes for
/// 0 <= k <= any band (x_{-k} = conj x_k, x_0 = 0).
struct Member {
  std::string id;
  std::size_t base = 0;
  double lambda = 1.0;
  double scale = 1.0;
  TimeProfile profile;
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;
  double decay = 1.0;

  [[nodiscard]] double time_value(double t) const { return scale * profile(lambda * t); }
  [[nodiscard]] double support() const { return profile.support() / lambda; }
  [[nodiscard]] std::vector<double> breaks() const {
    return {profile.width / lambda, profile.support() / lambda};
  }

  [[nodiscard]] cplx amplitude(int k) const {
    if (k == 0) return {};
    const int a = std::abs(k);
    const double re = rng::normal(seed, stream, static_cast<std::uint32_t>(a), 0);
    const double im = rng::normal(seed, stream, static_cast<std::uint32_t>(a), 1);
    const cplx z = cplx(re, im) * (std::pow(static_cast<double>(a), -decay) / std::numbers::sqrt2);
    return k > 0 ? z : std::conj(z);
  }

  /// The spatial factor on the 1-d torus of length 2 pi, |k| <= band.
  [[nodiscard]] FourierField field(int band) const {
    FourierField f(1, 2 * band, 2.0 * std::numbers::pi, true);
    for (int k = -band; k <= band; ++k) f.set({k, 0}, amplitude(k));
    return f;
  }
};

struct TestFamily {
  FamilySpec spec;
  std::vector<Member> members;
};

inline const char* to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::BandLimited: return "band_limited";
    case FamilyKind::ScaledBump: return "scaled_bump";
    case FamilyKind::Tensor: return "tensor";
  }
  return "";
}

inline const char* to_string(ProfileShape s) {
  switch (s) {
    case ProfileShape::Bump: return "bump";
    case ProfileShape::Taper: return "taper";
    case ProfileShape::Exponential: return "exponential";
    case ProfileShape::Indicator: return "indicator";
    case ProfileShape::RandomCosine: return "random_cosine";
  }
  return "";
}

/// Deterministic family: every random draw is a Philox value keyed by the seed
/// and the base index.  Members have unit L^2(R_+; L^2) norm at the base band.
inline TestFamily gen_family(const FamilySpec& spec) {
  spec.validate();
  TestFamily fam{spec, {}};
  const std::uint64_t seed = spec.seed;
  for (std::size_t b = 0; b < spec.size; ++b) {
    const auto bi = static_cast<std::uint32_t>(b);
    TimeProfile prof;
    prof.shape = spec.kind == FamilyKind::BandLimited ? ProfileShape::RandomCosine : spec.profile;
    prof.width = spec.width_min + (spec.width_max - spec.width_min) * detail::uniform(seed, bi, 0, 0);
    if (prof.shape == ProfileShape::RandomCosine) {
      prof.coeffs.assign(static_cast<std::size_t>(spec.terms), 1.0);
      for (int j = 1; j < spec.terms; ++j) {
        prof.coeffs[static_cast<std::size_t>(j)] =
            rng::normal(seed, bi, 1u << 20, static_cast<std::uint32_t>(j)) * std::pow(j, -spec.decay);
      }
    }
    Member base{.id = "", .base = b, .profile = prof, .seed = seed, .stream = bi,
                .decay = spec.decay};
    double x2 = 0.0;
    for (int k = 1; k <= spec.band; ++k) x2 += 2.0 * std::norm(base.amplitude(k));
    const double xnorm = std::sqrt(x2);

    const int j_lo = spec.kind == FamilyKind::ScaledBump ? spec.lambda_min : 0;
    const int j_hi = spec.kind == FamilyKind::ScaledBump ? spec.lambda_max : 0;
    for (int j = j_lo; j <= j_hi; ++j) {
      Member m = base;
      m.lambda = std::ldexp(1.0, j);
      const double l2 = std::sqrt(detail::integrate(
          [&](double t) { return std::pow(m.profile(m.lambda * t), 2); }, 0.0, m.support(),
          m.breaks(), 64));
      require(l2 > 0.0 && x2 > 0.0, "gen_family: member with zero norm");
      m.scale = 1.0 / (l2 * xnorm);
      m.id = "m" + std::to_string(b);
      if (spec.kind == FamilyKind::ScaledBump) m.id += "_l" + std::to_string(j);
      fam.members.push_back(std::move(m));
    }
  }
  return fam;
}

enum class CheckKind {
  Scaling,
  HardyYoung,
  Decomposition,
  Trace,
  Sobolev,
  MixedDerivative,
  Reiteration,
  Regularization,
};

inline const char* to_string(CheckKind k) {
  switch (k) {
    case CheckKind::Scaling: return "Scaling";
    case CheckKind::HardyYoung: return "HardyYoung";
    case CheckKind::Decomposition: return "Decomposition";
    case CheckKind::Trace: return "Trace";
    case CheckKind::Sobolev: return "Sobolev";
    case CheckKind::MixedDerivative: return "MixedDerivative";
    case CheckKind::Reiteration: return "Reiteration";
    case CheckKind::Regularization: return "Regularization";
  }
  return "";
}

/// Spatial couple (H^{a0}, H^{a1}) on the coordinates |x_k|, realised as the
/// sequence couple with weights (1 + |xi_k|^2)^{a_i/2}.
struct CoupleSpec {
  double a0 = 0.0;
  double a1 = 2.0;
  double qc = 2.0;

  [[nodiscard]] interp::SequenceCouple couple(const FourierField& f) const {
    std::vector<double> w0(f.size());
    std::vector<double> w1(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double r = 1.0 + std::pow(f.frequency(i), 2);
      w0[i] = std::pow(r, 0.5 * a0);
      w1[i] = std::pow(r, 0.5 * a1);
    }
    return {std::move(w0), std::move(w1), qc};
  }
};

/// Acceptance policy.  One-sided checks pass when every ratio is finite,
/// the family maximum stays below max_ratio, the spread max/min stays below
/// max_spread and the refinement factor stays below stability.  Identity
/// checks pass when every error is below tolerance.
struct Policy {
  double max_ratio = grid::kInf;
  double max_spread = grid::kInf;
  double stability = 2.0;
  std::optional<double> tolerance;  // identity checks; default per kind
};

struct CheckSpec {
  CheckKind kind = CheckKind::Trace;
  SpaceParams space0{};  // Scaling and Sobolev use space0 (and space1)
  SpaceParams space1{};  // s = 0 selects L^{p1}(w_gamma1) where allowed
  int k = 0;             // trace / regularization order
  double theta = 0.5;    // MixedDerivative
  double interp_p = 2.0; // MixedDerivative
  double theta0 = 0.25;  // Reiteration
  double theta1 = 0.75;
  double p_theta0 = 2.0;
  double p_theta1 = 2.0;
  double eta = 0.5;
  double hardy_p = 2.0;  // HardyYoung
  double hardy_beta = 0.5;
  std::vector<double> sigmas{0.5, 1.0, 2.0};  // Decomposition
  CoupleSpec couple{};
  double tau = 1.0 / 64.0;  // time step at level 0
  int refine = 1;           // extra levels, each halving tau and doubling the band
  double extent = 4.0;      // grid length in units of the member support
  int panels = 16;          // Decomposition quadrature panels at level 0
  Policy policy{};

  [[nodiscard]] bool identity() const noexcept {
    return kind == CheckKind::Scaling || kind == CheckKind::Decomposition;
  }
  [[nodiscard]] double tolerance() const {
    if (policy.tolerance) return *policy.tolerance;
    return kind == CheckKind::Scaling ? 1e-2 : 1e-6;
  }
  void validate() const;
};

struct MemberResult {
  std::string member_id;
  int level = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::vector<std::pair<std::string, double>> params;
};

struct VerificationReport {
  std::string check;
  std::string family;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> settings;  // derived exponents
  std::vector<MemberResult> rows;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double spread = 1.0;
  double stability = 1.0;
  double max_error = 0.0;  // identity checks
  bool pass = false;
  std::vector<std::string> failures;
};

namespace detail {

inline void require_hypothesis(bool cond, const std::string& what) {
  if (!cond) throw HypothesisError(what);
}

inline void validate_space(const SpaceParams& sp, const char* name) {
  try {
    sp.validate();
  } catch (const PreconditionError& e) {
    throw PreconditionError(std::string(name) + ": " + e.what());
  }
}

inline void require_seminorm_space(const SpaceParams& sp, const char* name) {
  validate_space(sp, name);
  require_hypothesis(sp.s > 0.0, std::string(name) + ": smoothness must be > 0 for a seminorm");
  require_hypothesis(sp.gamma > -1.0 && sp.gamma < sp.p - 1.0,
                     std::string(name) + ": weight exponent must lie in (-1, p - 1)");
}

inline SpaceParams mixed_space(const CheckSpec& c) {
  const double th = c.theta;
  SpaceParams sp;
  sp.p = 1.0 / ((1.0 - th) / c.space0.p + th / c.space1.p);
  const double iq = (1.0 - th) / c.space0.q + th / c.space1.q;
  sp.q = iq > 0.0 ? 1.0 / iq : grid::kInf;
  sp.s = c.space1.s + (1.0 - th) * (c.space0.s - c.space1.s);
  sp.gamma = sp.p * ((1.0 - th) * c.space0.gamma / c.space0.p + th * c.space1.gamma / c.space1.p);
  sp.m = std::max(c.space0.m, c.space1.m);
  return sp;
}

}  // namespace detail

inline void CheckSpec::validate() const {
  using detail::require_hypothesis;
  require(tau > 0.0 && std::isfinite(tau), "check: tau must be > 0");
  require(refine >= 0 && refine <= 6, "check: refine must lie in [0, 6]");
  require(extent >= 1.0 && std::isfinite(extent), "check: extent must be >= 1");
  require(panels >= 1, "check: panels must be >= 1");
  require(policy.stability > 1.0, "check: stability limit must be > 1");
  require(policy.max_ratio > 0.0 && policy.max_spread >= 1.0,
          "check: max_ratio must be > 0 and max_spread >= 1");
  if (policy.tolerance) require(*policy.tolerance > 0.0, "check: tolerance must be > 0");
  switch (kind) {
    case CheckKind::Scaling:
      detail::require_seminorm_space(space0, "space0");
      break;
    case CheckKind::HardyYoung:
      require_hypothesis(hardy_p >= 1.0 && std::isfinite(hardy_p), "HardyYoung: p must be >= 1");
      require_hypothesis(hardy_beta > 0.0 && hardy_beta < 1.0,
                         "HardyYoung: beta must lie in (0, 1)");
      break;
    case CheckKind::Decomposition:
      require(!sigmas.empty(), "Decomposition: sigmas must not be empty");
      for (double s : sigmas) {
        require(s > 0.0 && std::isfinite(s), "Decomposition: sigma must be > 0");
      }
      break;
    case CheckKind::Trace:
      detail::require_seminorm_space(space0, "space0");
      if (space1.s != 0.0) {
        detail::require_seminorm_space(space1, "space1");
      } else {
        detail::validate_space(space1, "space1");
        require_hypothesis(space1.gamma > -1.0 && space1.gamma < space1.p - 1.0,
                           "space1: weight exponent must lie in (-1, p - 1)");
      }
      require_hypothesis(k == 0 || k == 1, "Trace: order must be 0 or 1");
      (void)interp::trace_params(space0.s, space0.p, space0.gamma, space1.s, space1.p,
                                 space1.gamma, k);
      break;
    case CheckKind::Sobolev: {
      detail::require_seminorm_space(space0, "space0");
      detail::require_seminorm_space(space1, "space1");
      require_hypothesis(space0.p <= space1.p, "Sobolev: needs p0 <= p1");
      require_hypothesis(space0.s > space1.s, "Sobolev: needs s0 > s1");
      require_hypothesis(space0.gamma / space0.p >= space1.gamma / space1.p,
                         "Sobolev: needs gamma0/p0 >= gamma1/p1");
      const double d0 = space0.delta();
      const double d1 = space1.delta();
      require_hypothesis(std::abs(d0 - d1) <= 1e-12 * std::max(1.0, std::abs(d0)),
                         "Sobolev: Sobolev indices differ (" + std::to_string(d0) + " vs " +
                             std::to_string(d1) + ")");
      break;
    }
    case CheckKind::MixedDerivative: {
      detail::require_seminorm_space(space0, "space0");
      detail::require_seminorm_space(space1, "space1");
      require_hypothesis(theta > 0.0 && theta < 1.0, "MixedDerivative: theta must lie in (0, 1)");
      require_hypothesis(space1.s < space0.s, "MixedDerivative: needs s1 < s0");
      require_hypothesis(interp_p >= 1.0, "MixedDerivative: interp_p must be >= 1");
      detail::require_seminorm_space(detail::mixed_space(*this), "interpolated space");
      break;
    }
    case CheckKind::Reiteration:
      require_hypothesis(theta0 > 0.0 && theta0 < 1.0 && theta1 > 0.0 && theta1 < 1.0 &&
                             theta0 != theta1,
                         "Reiteration: needs distinct theta0, theta1 in (0, 1)");
      require_hypothesis(eta > 0.0 && eta < 1.0, "Reiteration: eta must lie in (0, 1)");
      require_hypothesis(p_theta0 >= 1.0 && p_theta1 >= 1.0 && interp_p >= 1.0,
                         "Reiteration: interpolation exponents must be >= 1");
      break;
    case CheckKind::Regularization:
      detail::require_seminorm_space(space0, "space0");
      if (space1.s != 0.0) {
        detail::require_seminorm_space(space1, "space1");
      } else {
        detail::validate_space(space1, "space1");
        require_hypothesis(space1.gamma >= 0.0 && space1.gamma < space1.p - 1.0,
                           "Regularization: L^p part needs gamma1 in [0, p1 - 1)");
      }
      require_hypothesis(k == 0 || k == 1, "Regularization: order must be 0 or 1");
      (void)interp::regularization_params(space0.s, space0.p, space0.gamma, space1.s, space1.p,
                                          space1.gamma, k);
      break;
  }
  require(couple.qc >= 1.0 && std::isfinite(couple.qc) && std::isfinite(couple.a0) &&
              std::isfinite(couple.a1) && couple.a0 != couple.a1,
          "check: couple needs distinct finite smoothness a0, a1 and qc >= 1");
}

namespace detail {

/// Time part of a member on the half-line grid of the given step, long
/// enough to cover extent * support.
inline ScalarFunction sample_time(const Member& m, double step, double extent) {
  const auto n = static_cast<std::size_t>(std::ceil(extent * m.support() / step));
  const auto g = Grid1D::half_line(step, std::max<std::size_t>(n, 4));
  return ScalarFunction::sample(g, [&](double t) { return m.time_value(t); });
}

/// Homogeneous seminorm with levels from the grid step up to the grid length.
inline double seminorm(const ScalarFunction& f, const SpaceParams& sp) {
  const double h = f.grid().step();
  const int j_min = -static_cast<int>(std::ceil(std::log2(f.grid().end() / h)));
  return spaces::tl_seminorm(f, sp, grid::DyadicLevels(j_min, 0, h)).value;
}

inline double lp(const ScalarFunction& f, double p, double gamma) {
  return grid::weighted_lp_norm(f, p, grid::PowerWeight(gamma));
}

/// Part of the X_1 factor: seminorm for s > 0, weighted L^p for s = 0.
inline double upper_part(const ScalarFunction& f, const SpaceParams& sp) {
  return sp.s != 0.0 ? seminorm(f, sp) : lp(f, sp.p, sp.gamma);
}

inline std::vector<double> coords(const FourierField& x) {
  std::vector<double> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = std::abs(x.amplitudes()[i]);
  return c;
}

/// Hardy-Young sides for the step function with the sampled values on each
/// cell: F = int_0^sigma f is piecewise linear, the right side is exact per
/// cell, the left side is exact on the first cell and past the grid and
/// Gauss-Legendre elsewhere.
inline std::pair<double, double> hardy_young(const ScalarFunction& f, double p, double beta) {
  const double h = f.grid().step();
  const double e = p - beta * p;
  double lhs = 0.0;
  double rhs = 0.0;
  double big_f = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double v = f[j];
    require(v >= 0.0, "HardyYoung: members must be nonnegative");
    const double a = static_cast<double>(j) * h;
    const double b = a + h;
    rhs += std::pow(v, p) * (std::pow(b, e) - std::pow(a, e)) / e;
    if (j == 0) {
      lhs += std::pow(v, p) * std::pow(h, e) / e;
    } else {
      lhs += interp::detail::gauss8(
          [&](double s) { return std::pow(s, -beta * p - 1.0) * std::pow(big_f + v * (s - a), p); },
          a, b);
    }
    big_f += v * h;
  }
  lhs += std::pow(big_f, p) * std::pow(f.grid().end(), -beta * p) / (beta * p);
  return {lhs, std::pow(beta, -p) * rhs};
}

/// T_1 = sigma^{-1} int_0^sigma u and T_0 = int_0^sigma t^{-2} (U(t) - t u(t)) dt.
inline std::pair<double, double> decomposition(const Member& m, double sigma, int panels) {
  const auto br = m.breaks();
  const auto u = [&](double t) { return m.time_value(t); };
  const auto big_u = [&](double t) { return integrate(u, 0.0, t, br, panels); };
  const double t1 = big_u(sigma) / sigma;
  const double t0 = integrate(
      [&](double t) { return (big_u(t) - t * u(t)) / (t * t); }, 0.0, sigma, br, panels);
  return {t0, t1};
}

}  // namespace detail

/// Evaluate a check over a family at refine + 1 discretization levels.
inline VerificationReport run_check(const CheckSpec& check, const TestFamily& family) {
  check.validate();
  require(!family.members.empty(), "run_check: empty family");
  VerificationReport rep;
  rep.check = to_string(check.kind);
  rep.family = to_string(family.spec.kind);
  rep.seed = family.spec.seed;
  const int base_band = family.spec.band;

  std::optional<interp::TraceParams> tp;
  std::optional<interp::RegularizationParams> rp;
  SpaceParams mixed;
  const auto& s0 = check.space0;
  const auto& s1 = check.space1;
  switch (check.kind) {
    case CheckKind::Scaling:
      rep.settings = {{"delta", s0.delta()}};
      break;
    case CheckKind::Trace:
      tp = interp::trace_params(s0.s, s0.p, s0.gamma, s1.s, s1.p, s1.gamma, check.k);
      rep.settings = {{"delta0", tp->delta0}, {"delta1", tp->delta1}, {"theta", tp->theta},
                      {"p", tp->p}};
      break;
    case CheckKind::Regularization:
      rp = interp::regularization_params(s0.s, s0.p, s0.gamma, s1.s, s1.p, s1.gamma, check.k);
      rep.settings = {{"eta", rp->eta}, {"r", rp->r}, {"mu", rp->mu}};
      break;
    case CheckKind::MixedDerivative:
      mixed = detail::mixed_space(check);
      rep.settings = {{"s", mixed.s}, {"p", mixed.p}, {"q", mixed.q}, {"gamma", mixed.gamma}};
      break;
    case CheckKind::Reiteration:
      rep.settings = {{"theta", (1.0 - check.eta) * check.theta0 + check.eta * check.theta1}};
      break;
    default:
      break;
  }

  for (int level = 0; level <= check.refine; ++level) {
    const double tau = std::ldexp(check.tau, -level);
    const int band = base_band << level;
    for (const auto& m : family.members) {
      const auto x = m.field(band);
      const auto c = check.couple.couple(x);
      const auto xc = detail::coords(x);
      const double lambda = m.lambda;
      auto add = [&](double lhs, double rhs,
                     std::vector<std::pair<std::string, double>> extra = {}, std::string suffix = "") {
        MemberResult r{m.id + suffix, level, lhs, rhs, lhs / rhs, {{"level", level}, {"tau", tau},
                                                                  {"band", band}, {"lambda", lambda}}};
        for (auto& e : extra) r.params.push_back(std::move(e));
        rep.rows.push_back(std::move(r));
      };

      switch (check.kind) {
        case CheckKind::Scaling: {
          // The dilated member on the dilated grid against the undilated
          // profile with the same normalization.
          const auto f = detail::sample_time(m, tau / lambda, check.extent);
          Member undilated = m;
          undilated.lambda = 1.0;
          const auto g = detail::sample_time(undilated, tau, check.extent);
          const double xn = c.norm(0, xc);
          add(detail::seminorm(f, s0) * xn,
              std::pow(lambda, s0.delta()) * detail::seminorm(g, s0) * xn);
          break;
        }
        case CheckKind::HardyYoung: {
          const auto f = detail::sample_time(m, tau, 1.0);
          const auto [l, r] = detail::hardy_young(f, check.hardy_p, check.hardy_beta);
          add(l, r);
          break;
        }
        case CheckKind::Decomposition: {
          const int panels = check.panels << level;
          const double xn = c.norm(0, xc);
          for (std::size_t i = 0; i < check.sigmas.size(); ++i) {
            const double sigma = check.sigmas[i];
            const auto [t0, t1] = detail::decomposition(m, sigma, panels);
            add((t0 + t1) * xn, m.time_value(0.0) * xn,
                {{"sigma", sigma}, {"T0", t0 * xn}, {"T1", t1 * xn}}, "_s" + std::to_string(i));
          }
          break;
        }
        case CheckKind::Trace: {
          const auto f = detail::sample_time(m, tau, check.extent);
          const double tr = check.k == 0 ? f[0] : (f[1] - f[0]) / tau;
          const double a = detail::seminorm(f, s0);
          const double b = detail::upper_part(f, s1);
          const double lhs = std::abs(tr) * interp::interp_norm(c, xc, tp->theta, tp->p);
          const double rhs = std::pow(a * c.norm(0, xc), 1.0 - tp->theta) *
                             std::pow(b * c.norm(1, xc), tp->theta);
          add(lhs, rhs, {{"trace", tr}});
          break;
        }
        case CheckKind::Sobolev: {
          const auto f = detail::sample_time(m, tau, check.extent);
          const double xn = c.norm(0, xc);
          add(detail::seminorm(f, s1) * xn, detail::seminorm(f, s0) * xn);
          break;
        }
        case CheckKind::MixedDerivative: {
          const auto f = detail::sample_time(m, tau, check.extent);
          const double lhs =
              detail::seminorm(f, mixed) * interp::interp_norm(c, xc, check.theta, check.interp_p);
          const double rhs = std::pow(detail::seminorm(f, s0) * c.norm(0, xc), 1.0 - check.theta) *
                             std::pow(detail::seminorm(f, s1) * c.norm(1, xc), check.theta);
          add(lhs, rhs);
          break;
        }
        case CheckKind::Reiteration: {
          const double th = (1.0 - check.eta) * check.theta0 + check.eta * check.theta1;
          const auto rc =
              interp::reiterated_couple(c, check.theta0, check.p_theta0, check.theta1, check.p_theta1);
          add(interp::interp_norm(rc, xc, check.eta, check.interp_p),
              interp::interp_norm(c, xc, th, check.interp_p));
          break;
        }
        case CheckKind::Regularization: {
          const auto f = detail::sample_time(m, tau, check.extent);
          double sup = 0.0;
          if (check.k == 0) {
            for (std::size_t n = 0; n < f.size(); ++n) {
              sup = std::max(sup, std::pow(f.grid().node(n), rp->mu) * std::abs(f[n]));
            }
          } else {
            for (std::size_t n = 0; n + 1 < f.size(); ++n) {
              const double t = 0.5 * (f.grid().node(n) + f.grid().node(n + 1));
              sup = std::max(sup, std::pow(t, rp->mu) * std::abs(f[n + 1] - f[n]) / tau);
            }
          }
          const double n0 = detail::lp(f, s0.p, s0.gamma) + detail::seminorm(f, s0);
          double n1 = detail::lp(f, s1.p, s1.gamma);
          if (s1.s != 0.0) n1 += detail::seminorm(f, s1);
          const double lhs = sup * interp::interp_norm(c, xc, rp->eta, rp->r);
          const double rhs = std::pow(n0 * c.norm(0, xc), 1.0 - rp->eta) *
                             std::pow(n1 * c.norm(1, xc), rp->eta);
          add(lhs, rhs);
          break;
        }
      }
    }
  }

  // Aggregate over the level-0 rows; stability compares each row with its
  // counterpart at every other level.
  const std::size_t per_level = rep.rows.size() / static_cast<std::size_t>(check.refine + 1);
  bool finite = true;
  rep.max_ratio = 0.0;
  rep.min_ratio = grid::kInf;
  for (const auto& r : rep.rows) {
    if (!std::isfinite(r.ratio) || !std::isfinite(r.lhs) || !std::isfinite(r.rhs)) finite = false;
    if (r.level == 0) {
      rep.max_ratio = std::max(rep.max_ratio, r.ratio);
      rep.min_ratio = std::min(rep.min_ratio, r.ratio);
    }
  }
  rep.spread = rep.min_ratio > 0.0 ? rep.max_ratio / rep.min_ratio : grid::kInf;
  rep.stability = 1.0;
  for (std::size_t i = 0; i < per_level; ++i) {
    double hi = rep.rows[i].ratio;
    double lo = hi;
    for (int l = 1; l <= check.refine; ++l) {
      const double r = rep.rows[i + static_cast<std::size_t>(l) * per_level].ratio;
      hi = std::max(hi, r);
      lo = std::min(lo, r);
    }
    if (hi > 0.0) rep.stability = std::max(rep.stability, lo > 0.0 ? hi / lo : grid::kInf);
  }

  if (!finite) rep.failures.emplace_back("non-finite ratio");
  if (check.identity()) {
    const double tol = check.tolerance();
    for (const auto& r : rep.rows) {
      const double err = check.kind == CheckKind::Scaling ? std::abs(r.lhs - r.rhs) / std::abs(r.rhs)
                                                          : std::abs(r.lhs - r.rhs);
      rep.max_error = std::max(rep.max_error, err);
    }
    if (!(rep.max_error < tol)) {
      rep.failures.push_back("error " + std::to_string(rep.max_error) + " exceeds tolerance " +
                             std::to_string(tol));
    }
  } else {
    if (!(rep.max_ratio <= check.policy.max_ratio)) {
      rep.failures.push_back("max ratio " + std::to_string(rep.max_ratio) + " exceeds " +
                             std::to_string(check.policy.max_ratio));
    }
    if (!(rep.spread <= check.policy.max_spread)) {
      rep.failures.push_back("spread " + std::to_string(rep.spread) + " exceeds " +
                             std::to_string(check.policy.max_spread));
    }
    if (!(rep.stability < check.policy.stability)) {
      rep.failures.push_back("refinement factor " + std::to_string(rep.stability) +
                             " reaches " + std::to_string(check.policy.stability));
    }
  }
  rep.pass = rep.failures.empty();
  return rep;
}

}  // namespace tracelab::harness
