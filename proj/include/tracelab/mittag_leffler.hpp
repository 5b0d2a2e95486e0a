#pragma once

// Mittag-Leffler function E_alpha(z) on the non-positive real axis.

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "tracelab/error.hpp"

namespace tracelab::fraccalc {

namespace detail {

// E_alpha(z) = -sum_{k>=1} z^{-k} / Gamma(1 - alpha k) for alpha < 1 and
// large negative z, truncated at the smallest term.
inline double mittag_leffler_asymptotic(double alpha, double z) {
  double sum = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  double zk = 1.0;
  for (int k = 1; k < 400; ++k) {
    zk /= z;
    const double arg = 1.0 - alpha * k;
    // 1/Gamma vanishes at the poles.
    if (arg <= 0.0 && arg == std::floor(arg)) continue;
    const double term = zk / std::tgamma(arg);
    if (!std::isfinite(term)) break;
    if (std::abs(term) > prev) break;
    sum -= term;
    prev = std::abs(term);
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// 1/Gamma(alpha n + 1) at the working precision, reused across calls with
// the same alpha.
struct MittagLefflerCache {
  double alpha = 0.0;
  unsigned digits = 0;
  std::vector<boost::multiprecision::mpfr_float> inv_gamma;
};

inline MittagLefflerCache& ml_cache() {
  thread_local MittagLefflerCache cache;
  return cache;
}

}  // namespace detail

/// E_alpha(z) = sum_n z^n / Gamma(alpha n + 1) for alpha > 0 and z <= 0.
///
/// The power series is summed in MPFR arithmetic with enough digits to absorb
/// the cancellation between its terms (their largest magnitude is about
/// exp(|z|^{1/alpha})).  For alpha < 1 and |z| > 30 the algebraic asymptotic
/// expansion is used instead; on the negative axis it carries no exponential
/// part for alpha < 1.
inline double mittag_leffler(double alpha, double z) {
  using boost::multiprecision::mpfr_float;
  tracelab::detail::require(alpha > 0.0 && std::isfinite(alpha),
                            "mittag_leffler: alpha must be > 0");
  tracelab::detail::require(z <= 0.0 && std::isfinite(z), "mittag_leffler: z must be <= 0");
  if (z == 0.0) return 1.0;
  if (alpha == 1.0) return std::exp(z);
  const double x = -z;
  if (alpha < 1.0 && x > 30.0) return detail::mittag_leffler_asymptotic(alpha, z);

  const double scale = std::pow(x, 1.0 / alpha);
  if (scale > 2e5) {
    throw ResolutionError("mittag_leffler: |z|^{1/alpha} = " + std::to_string(scale) +
                          " is too large for the series");
  }
  const auto digits = static_cast<unsigned>(scale / std::log(10.0) + 30.0);
  const auto terms = static_cast<std::size_t>((scale + 2.0) / alpha) + 1;
  const unsigned saved = mpfr_float::default_precision();
  auto& cache = detail::ml_cache();
  if (cache.alpha != alpha || cache.digits < digits) {
    cache.alpha = alpha;
    cache.digits = std::max(digits, cache.digits);
    cache.inv_gamma.clear();
  }
  mpfr_float::default_precision(cache.digits);
  const mpfr_float a(alpha);
  while (cache.inv_gamma.size() < terms) {
    const auto n = static_cast<long>(cache.inv_gamma.size());
    cache.inv_gamma.emplace_back(1 / boost::multiprecision::tgamma(a * n + 1));
  }

  const mpfr_float zz(z);
  const mpfr_float tiny = boost::multiprecision::pow(mpfr_float(10), -25);
  mpfr_float sum(0);
  mpfr_float zn(1);
  for (std::size_t n = 0;; ++n) {
    if (n == cache.inv_gamma.size()) {
      cache.inv_gamma.emplace_back(1 / boost::multiprecision::tgamma(a * static_cast<long>(n) + 1));
    }
    const mpfr_float term = zn * cache.inv_gamma[n];
    sum += term;
    // Terms decrease monotonically once n alpha exceeds |z|^{1/alpha}.
    if (n >= terms && boost::multiprecision::abs(term) < tiny) break;
    zn *= zz;
  }
  const double out = sum.convert_to<double>();
  mpfr_float::default_precision(saved);
  return out;
}

}  // namespace tracelab::fraccalc
