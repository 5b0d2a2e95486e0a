// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tracelab/evolve.hpp"
#include "tracelab/fraccalc.hpp"
#include "tracelab/harness.hpp"
#include "tracelab/interp.hpp"
#include "tracelab/stoch.hpp"

using namespace tracelab;
using grid::Grid1D;
using grid::ScalarFunction;
using spaces::FourierField;
using cplx = std::complex<double>;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[violated: " << what << "] ";
    }
  }
};

double order(double coarse, double fine) { return std::log2(coarse / fine); }

// Volterra solver against the Mittag-Leffler relaxation.
void volterra_oracle(Outcome& out) {
  double worst_err = 0.0;
  double worst_order = INFINITY;
  for (double alpha : {0.5, 1.0, 1.5}) {
    for (double mu : {0.1, 1.0, 10.0}) {
      double prev = 0.0;
      for (double tau : {1e-3, 5e-4}) {
        const auto n_nodes = static_cast<std::size_t>(std::lround(1.0 / tau));
        const auto g = Grid1D::half_line(tau, n_nodes);
        const fraccalc::FracQuadrature q(g, alpha, fraccalc::starting_exponents(alpha, 3),
                                         fraccalc::QuadratureRule::ProductMidpoint);
        const auto u = evolve::volterra_solve_scalar(q, mu, std::vector<double>(n_nodes, 1.0));
        double e = 0.0;
        for (std::size_t n = 0; n < n_nodes; ++n) {
          const double t = g.node(n);
          if (t < tau) continue;
          const double ex = (1.0 - fraccalc::mittag_leffler(alpha, -mu * std::pow(t, alpha))) / mu;
          e = std::max(e, std::abs(u[n] - ex) / ex);
        }
        if (tau == 1e-3) {
          out.require(e < 1e-2, "relative error < 1e-2");
          worst_err = std::max(worst_err, e);
        } else {
          const double r = order(prev, e);
          out.require(r >= 0.8, "observed order >= 0.8");
          worst_order = std::min(worst_order, r);
        }
        prev = e;
      }
    }
  }
  out.detail << "max rel err at tau=1e-3 " << worst_err << ", min order " << worst_order;
}

stoch::StochProblem single_mode(Grid1D time, std::size_t paths, std::uint64_t seed) {
  const FourierField geom(1, 2, kTwoPi);
  std::vector<double> amp(geom.size(), 0.0);
  amp[geom.index({1, 0})] = 1.0;
  return {.op = evolve::SpectralOperator(geom, 1.0), .g = amp, .time = time, .paths = paths,
          .seed = seed};
}

// Monte Carlo second moment of the single-mode stochastic heat equation.
void stochastic_moments(Outcome& out) {
  double worst_z = 0.0;
  for (double t : {0.5, 1.0, 2.0}) {
    const auto g = Grid1D::half_line(0.4 * t, 3);
    const auto prob = single_mode(g, 10000, 20240611);
    const auto a = stoch::simulate_ensemble(prob);
    const auto b = stoch::simulate_ensemble(prob);
    const std::size_t len = a.paths() * g.count();
    out.require(std::memcmp(a.series(0, 0), b.series(0, 0), len * sizeof(double)) == 0,
                "bitwise identical rerun");
    std::vector<double> x(a.paths());
    for (std::size_t p = 0; p < a.paths(); ++p) x[p] = std::pow(a.series(p, 0)[2], 2);
    const auto s = stoch::summarize("m2", x);
    const double z = std::abs(s.mean + std::expm1(-2.0 * g.node(2)) / 2.0) / s.std_error;
    out.require(z < 3.0, "within 3 standard errors");
    worst_z = std::max(worst_z, z);
  }
  out.detail << "worst deviation " << worst_z << " standard errors, reruns bitwise identical";
}

// Trace ratio across dilations 2^-4..2^4 and one refinement.
void trace_scaling(Outcome& out) {
  using namespace harness;
  const auto fam = gen_family({.kind = FamilyKind::ScaledBump, .seed = 1, .size = 1,
                               .profile = ProfileShape::Bump, .width_min = 1.0,
                               .width_max = 1.0, .band = 4, .decay = 4.0, .lambda_min = -4,
                               .lambda_max = 4});
  CheckSpec c{.kind = CheckKind::Trace, .space0 = {.s = 0.75, .p = 2.0, .q = 2.0},
              .space1 = {.s = 0.0, .p = 2.0}, .tau = 1.0 / 256, .refine = 1};
  c.policy.max_spread = 1.2;
  c.policy.stability = 1.1;
  const auto rep = run_check(c, fam);
  out.require(rep.rows.size() == 18, "nine dilations at two levels");
  out.require(rep.spread < 1.2, "spread across dilations < 1.2");
  out.require(rep.stability < 1.1, "refinement change < 1.1");
  out.require(rep.pass, "policy");
  out.detail << "spread " << rep.spread << ", refinement factor " << rep.stability;
}

// Hardy-Young inequality with its sharp constant.
void hardy_young(Outcome& out) {
  using namespace harness;
  const auto ind = gen_family({.kind = FamilyKind::Tensor, .size = 1,
                               .profile = ProfileShape::Indicator, .width_min = 1.0,
                               .width_max = 1.0, .band = 2});
  CheckSpec eq{.kind = CheckKind::HardyYoung, .hardy_p = 1.0, .hardy_beta = 0.5};
  const auto r_eq = run_check(eq, ind);
  out.require(std::abs(r_eq.max_ratio - 1.0) <= 0.01 && std::abs(r_eq.min_ratio - 1.0) <= 0.01,
              "indicator ratio 1 +- 0.01");

  const auto fam = gen_family({.kind = FamilyKind::BandLimited, .seed = 17, .size = 50});
  double worst = 0.0;
  for (double p : {1.0, 2.0, 3.0}) {
    for (double beta : {0.25, 0.5, 0.75}) {
      CheckSpec c{.kind = CheckKind::HardyYoung, .hardy_p = p, .hardy_beta = beta};
      const auto r = run_check(c, fam);
      out.require(r.rows.size() >= 50, "50 members");
      out.require(r.max_ratio <= 1.01, "random ratio <= 1.01");
      worst = std::max(worst, r.max_ratio);
    }
  }
  out.detail << "indicator ratio " << r_eq.max_ratio << ", max over 50 random members " << worst;
}

double max_interior(const ScalarFunction& a, const ScalarFunction& b, std::size_t skip) {
  double e = 0.0;
  for (std::size_t n = skip; n + skip < a.size(); ++n) e = std::max(e, std::abs(a[n] - b[n]));
  return e;
}

// Inverse pair, semigroup and resolvent identities.
void identities(Outcome& out) {
  const auto g = Grid1D::half_line(0.02, 100);
  const auto f = ScalarFunction::sample(g, [](double t) { return std::cos(2 * t) + 0.5 * t; });
  double round_trip = 0.0;
  for (double alpha : {0.3, 0.5, 0.8}) {
    const auto back = fraccalc::frac_derivative(fraccalc::frac_integral(f, alpha), alpha);
    round_trip = std::max(round_trip, max_interior(back, f, 1));
  }
  out.require(round_trip < 1e-12, "round trip < 1e-12");

  const double a = 0.3;
  const double b = 0.45;
  double prev = 0.0;
  double worst_order = INFINITY;
  for (std::size_t n : {200, 400, 800}) {
    const auto gg = Grid1D::half_line(1.0 / n, n);
    const auto one = ScalarFunction::sample(gg, [](double) { return 1.0; });
    const auto ab = fraccalc::frac_integral(fraccalc::frac_integral(one, b), a);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = gg.node(i);
      if (t >= 0.25) e = std::max(e, std::abs(ab[i] - std::pow(t, a + b) / std::tgamma(a + b + 1)));
    }
    if (prev > 0.0) worst_order = std::min(worst_order, order(prev, e));
    prev = e;
  }
  out.require(worst_order >= 0.8, "semigroup order >= 0.8");

  const auto gr = Grid1D::half_line(0.05, 80);
  const auto fr = ScalarFunction::sample(gr, [](double t) { return std::cos(t) + t; });
  double resolvent = 0.0;
  for (auto [lam, mu] : {std::pair{0.7, 2.3}, std::pair{0.1, 5.0}, std::pair{3.0, 0.2}}) {
    const auto rl = fraccalc::resolvent_apply(fr, lam);
    const auto rm = fraccalc::resolvent_apply(fr, mu);
    const auto rlm = fraccalc::resolvent_apply(rm, lam);
    for (std::size_t n = 0; n < fr.size(); ++n) {
      resolvent = std::max(resolvent, std::abs(rl[n] - rm[n] - (mu - lam) * rlm[n]));
    }
  }
  out.require(resolvent < 1e-10, "resolvent identity < 1e-10");
  out.detail << "round trip " << round_trip << ", semigroup order " << worst_order
             << ", resolvent defect " << resolvent;
}

// Balakrishnan formula against backward Grunwald-Letnikov differences.
void balakrishnan(Outcome& out) {
  const std::vector<std::function<double(double)>> tests = {
      [](double t) {
        const double u = t - 2.0;
        return std::abs(u) < 1.0 ? std::pow(1 - u * u, 4) : 0.0;
      },
      [](double t) {
        const double u = (t - 1.8) / 1.2;
        return std::abs(u) < 1.0 ? std::pow(1 - u * u, 5) * std::sin(3 * t) : 0.0;
      }};
  double worst_order = INFINITY;
  for (double s : {0.3, 0.5, 0.7}) {
    for (int m : {1, 2}) {
      for (const auto& fn : tests) {
        double prev = 0.0;
        for (std::size_t n : {200, 400, 800}) {
          const auto g = Grid1D::half_line(4.0 / n, n);
          const auto f = ScalarFunction::sample(g, fn);
          const auto bk = fraccalc::balakrishnan_derivative(f, s, m);
          const auto gl = fraccalc::frac_derivative(f, s, fraccalc::Direction::Backward);
          double num = 0.0;
          double den = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            num += std::pow(bk[i] - gl[i], 2);
            den += gl[i] * gl[i];
          }
          const double e = std::sqrt(num / den);
          if (prev > 0.0) {
            const double r = order(prev, e);
            out.require(r >= 0.8, "order >= 0.8");
            worst_order = std::min(worst_order, r);
          }
          prev = e;
        }
      }
    }
  }
  out.detail << "min observed order " << worst_order;
}

// Reflection extension reproduces polynomials.
void extension(Outcome& out) {
  const fraccalc::ExtensionCoeffs e1(1);
  out.require(e1.coeffs().size() == 2 && e1.coeffs()[0] == 3.0 && e1.coeffs()[1] == -2.0,
              "m = 1 coefficients (3, -2)");
  const auto g = Grid1D::half_line(0.01, 400);
  double worst = 0.0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (int m = 0; m <= 4; ++m) {
    for (int degree = 0; degree <= m; ++degree) {
      std::vector<double> c(degree + 1);
      for (auto& v : c) v = ud(rng);
      const auto poly = [&](double t) {
        double v = 0.0;
        for (int k = degree; k >= 0; --k) v = v * t + c[k];
        return v;
      };
      const auto ext = fraccalc::extension_operator(ScalarFunction::sample(g, poly), m);
      const auto& fg = ext.function.grid();
      for (std::size_t n = 0; n < fg.count(); ++n) {
        const double t = fg.node(n);
        if (t < 0.0 && -t * (m + 1) > g.end()) continue;  // reflected node beyond the data
        worst = std::max(worst, std::abs(ext.function[n] - poly(t)));
      }
    }
  }
  out.require(worst < 1e-10, "polynomial error < 1e-10");
  out.detail << "coefficients (" << e1.coeffs()[0] << ", " << e1.coeffs()[1]
             << "), max polynomial error " << worst;
}

// Real mean-zero forcing of band 4 with a smooth time profile on [0, 1].
evolve::SpaceTimeField forcing(const FourierField& geom, const Grid1D& time, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  evolve::SpaceTimeField f(time, geom);
  for (int k = 1; k <= 4; ++k) {
    const cplx a(nd(rng) / k, nd(rng) / k);
    const double nu = kTwoPi * (1.0 + std::abs(nd(rng)));
    auto& pos = f.mode(geom.index({k, 0}));
    auto& neg = f.mode(geom.index({-k, 0}));
    for (std::size_t n = 0; n < time.count(); ++n) {
      const double t = time.node(n);
      const double phi = t < 1.0 ? std::pow(std::sin(std::numbers::pi * t), 2) : 0.0;
      pos[n] = a * phi * std::cos(nu * t);
      neg[n] = std::conj(pos[n]);
    }
  }
  return f;
}

// Maximal-regularity ratio under time and space refinement.
void maxreg(Outcome& out) {
  double worst = 0.0;
  double lo_all = INFINITY;
  double hi_all = 0.0;
  for (double gamma : {0.0, 0.5}) {
    for (unsigned member = 0; member < 10; ++member) {
      double lo = INFINITY;
      double hi = 0.0;
      for (int ti = 0; ti <= 2; ++ti) {
        for (int bi = 0; bi <= 2; ++bi) {
          const std::size_t n = 64U << ti;
          const FourierField geom(1, 16 << bi, kTwoPi);
          const auto g = Grid1D::half_line(2.0 / n, n);
          const evolve::VolterraProblem prob{.alpha = 0.5,
                                             .op = evolve::SpectralOperator(geom, 1.0),
                                             .forcing = forcing(geom, g, 100 + member),
                                             .gamma = gamma};
          const double r =
              evolve::maxreg_trace_report(prob, evolve::volterra_solve(prob), false).maxreg_ratio();
          lo = std::min(lo, r);
          hi = std::max(hi, r);
        }
      }
      worst = std::max(worst, hi / lo);
      lo_all = std::min(lo_all, lo);
      hi_all = std::max(hi_all, hi);
    }
  }
  out.require(worst < 2.0, "variation factor < 2");
  out.detail << "ratios in [" << lo_all << ", " << hi_all << "], worst per-member factor "
             << worst;
}

// Interpolation norm closed form and reiteration stability.
void interpolation(Outcome& out) {
  double worst = 0.0;
  for (double a : {0.3, 1.0, 7.0}) {
    for (double b : {0.01, 2.0, 50.0}) {
      for (double theta : {0.1, 0.5, 0.85}) {
        for (double p : {1.0, 2.0, 3.5}) {
          const interp::SequenceCouple c({a}, {b}, 2.0);
          const double exact = std::pow(a, 1 - theta) * std::pow(b, theta) *
                               std::pow(1 / (p * (1 - theta)) + 1 / (p * theta), 1 / p);
          const std::vector<double> unit = {1.0};
          const double v = interp::interp_norm(c, unit, theta, p);
          worst = std::max(worst, std::abs(v / exact - 1.0));
        }
      }
    }
  }
  out.require(worst < 1e-6, "closed form to 1e-6");

  const double theta0 = 0.2;
  const double theta1 = 0.7;
  const double eta = 0.4;
  const double theta = (1 - eta) * theta0 + eta * theta1;
  double lo = INFINITY;
  double hi = 0.0;
  for (int refine = 0; refine < 3; ++refine) {
    const int n = 8 << refine;
    std::vector<double> w0(n, 1.0);
    std::vector<double> w1(n);
    for (int i = 0; i < n; ++i) w1[i] = std::exp2(8.0 * i / n);
    const interp::SequenceCouple c(w0, w1, 2.0);
    const auto nested = interp::reiterated_couple(c, theta0, 2.0, theta1, 3.0);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (int member = 0; member < 10; ++member) {
      std::vector<double> x(n);
      for (auto& v : x) v = nd(rng);
      const double r = interp::interp_norm(nested, x, eta, 2.0) / interp::interp_norm(c, x, theta, 2.0);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  out.require(hi / lo < 4.0, "reiteration within factor 4");
  out.detail << "closed-form rel err " << worst << ", reiteration ratios [" << lo << ", " << hi
             << "]";
}

// T0(sigma) + T1(sigma) recovers u(0) for u(t) = e^{-t}.
void decomposition(Outcome& out) {
  using namespace harness;
  const auto fam = gen_family({.kind = FamilyKind::Tensor, .size = 1,
                               .profile = ProfileShape::Exponential,
                               .width_min = 1.0, .width_max = 1.0});
  const auto& m = fam.members[0];
  double worst = 0.0;
  for (double sigma : {0.5, 1.0, 2.0}) {
    const auto [t0, t1] = harness::detail::decomposition(m, sigma, 16);
    worst = std::max(worst, std::abs(t0 + t1 - m.time_value(0.0)) / m.time_value(0.0));
  }
  const auto rep = run_check({.kind = CheckKind::Decomposition}, fam);
  out.require(worst < 1e-6 && rep.max_error < 1e-6, "identity error < 1e-6");
  out.require(rep.pass, "policy");
  out.detail << "max identity error " << std::max(worst, rep.max_error);
}

struct Criterion {
  const char* name;
  double budget_seconds;
  void (*run)(Outcome&);
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"volterra-mittag-leffler", 5.0, volterra_oracle},
      {"stochastic-moments", 10.0, stochastic_moments},
      {"trace-scaling-invariance", 60.0, trace_scaling},
      {"hardy-young-constant", 60.0, hardy_young},
      {"inverse-semigroup-resolvent", 60.0, identities},
      {"balakrishnan-grunwald", 60.0, balakrishnan},
      {"extension-exactness", 60.0, extension},
      {"maxreg-stability", 60.0, maxreg},
      {"interpolation-closed-form", 60.0, interpolation},
      {"decomposition-identity", 60.0, decomposition},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.require(secs < c.budget_seconds, "runtime budget");
    failures += out.pass ? 0 : 1;
    std::printf("%s %2d %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", index, c.name,
                out.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
