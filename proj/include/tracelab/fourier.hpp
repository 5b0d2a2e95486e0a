#pragma once

// Periodic spatial fields stored by their Fourier amplitudes, the FFTW-backed
// transforms between amplitudes and physical samples, and the
// Littlewood-Paley filter bank used for Besov norms.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "tracelab/error.hpp"

namespace tracelab::spaces {

using cplx = std::complex<double>;

/// Integer frequency vector; the second entry is ignored for d = 1.
using Wavenumber = std::array<int, 2>;

/// Complex amplitudes u_k, |k_i| <= M/2, of a field on the torus [0, L)^d.
///
/// The field is u(x) = sum_k u_k exp(2 pi i k.x / L).  Spatial norms use the
/// averaged measure L^{-d} dx, so ||u||_2^2 = sum_k |u_k|^2.
class FourierField {
 public:
  FourierField(int dim, int modes, double length, bool mean_zero = false)
      : dim_(dim), modes_(modes), length_(length), mean_zero_(mean_zero) {
    detail::require(dim == 1 || dim == 2, "FourierField: dimension must be 1 or 2");
    detail::require(modes >= 2 && modes % 2 == 0, "FourierField: modes per axis must be even");
    detail::require(length > 0.0 && std::isfinite(length), "FourierField: length must be > 0");
    amp_.assign(static_cast<std::size_t>(dim == 1 ? side() : side() * side()), cplx{});
  }

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] int modes() const noexcept { return modes_; }
  [[nodiscard]] double length() const noexcept { return length_; }
  [[nodiscard]] bool mean_zero() const noexcept { return mean_zero_; }
  [[nodiscard]] int half() const noexcept { return modes_ / 2; }
  [[nodiscard]] int side() const noexcept { return modes_ + 1; }
  [[nodiscard]] std::size_t size() const noexcept { return amp_.size(); }

  [[nodiscard]] bool same_geometry(const FourierField& o) const noexcept {
    return dim_ == o.dim_ && modes_ == o.modes_ && length_ == o.length_;
  }

  /// Flat index <-> wavenumber.
  [[nodiscard]] Wavenumber wavenumber(std::size_t idx) const noexcept {
    const int s = side();
    if (dim_ == 1) return {static_cast<int>(idx) - half(), 0};
    return {static_cast<int>(idx) / s - half(), static_cast<int>(idx) % s - half()};
  }
  [[nodiscard]] std::size_t index(Wavenumber k) const {
    const int h = half();
    detail::require(std::abs(k[0]) <= h && (dim_ == 1 || std::abs(k[1]) <= h),
                    "FourierField: wavenumber out of range");
    if (dim_ == 1) return static_cast<std::size_t>(k[0] + h);
    return static_cast<std::size_t>((k[0] + h) * side() + (k[1] + h));
  }

  /// |xi| for xi = 2 pi k / L.
  [[nodiscard]] double frequency(std::size_t idx) const noexcept {
    const auto k = wavenumber(idx);
    const double k2 = static_cast<double>(k[0]) * k[0] + (dim_ == 2 ? double(k[1]) * k[1] : 0.0);
    return 2.0 * std::numbers::pi / length_ * std::sqrt(k2);
  }

  [[nodiscard]] cplx at(Wavenumber k) const { return amp_[index(k)]; }
  void set(Wavenumber k, cplx value) {
    const auto i = index(k);
    if (mean_zero_ && frequency(i) == 0.0 && value != cplx{}) {
      throw PreconditionError("FourierField: mean-zero field cannot carry a k = 0 amplitude");
    }
    amp_[i] = value;
  }

  [[nodiscard]] std::span<const cplx> amplitudes() const noexcept { return amp_; }
  [[nodiscard]] std::span<cplx> amplitudes() noexcept { return amp_; }

  /// sqrt(sum |u_k|^2): the averaged L^2 norm by Plancherel.
  [[nodiscard]] double l2_norm() const noexcept {
    double s = 0.0;
    for (const auto& a : amp_) s += std::norm(a);
    return std::sqrt(s);
  }

  /// Amplitude at -k equals the conjugate of the amplitude at k.
  [[nodiscard]] bool is_hermitian(double tol = 1e-14) const {
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      const auto k = wavenumber(i);
      const auto j = index({-k[0], dim_ == 2 ? -k[1] : 0});
      if (std::abs(amp_[i] - std::conj(amp_[j])) > tol) return false;
    }
    return true;
  }

  /// Multiply every amplitude by m(|xi|).
  template <class Fn>
  [[nodiscard]] FourierField multiplied(Fn&& m) const {
    FourierField out = *this;
    for (std::size_t i = 0; i < amp_.size(); ++i) out.amp_[i] *= m(frequency(i));
    return out;
  }

 private:
  int dim_;
  int modes_;
  double length_;
  bool mean_zero_;
  std::vector<cplx> amp_;
};

namespace detail {

using tracelab::detail::require;

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const noexcept { fftw_destroy_plan(p); }
};
using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDeleter>;

inline fftw_complex* as_fftw(cplx* p) noexcept { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace detail

/// In-place unnormalized complex DFT of `data` with sign +1 (backward) or -1
/// (forward); shape is {n} or {n, n}.
inline void dft_inplace(std::vector<cplx>& data, int n, int dim, int sign) {
  detail::require(n > 0, "dft_inplace: size must be positive");
  const auto expected = static_cast<std::size_t>(dim == 1 ? n : n * n);
  detail::require(data.size() == expected, "dft_inplace: transform-size mismatch");
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_complex* buf = detail::as_fftw(data.data());
  detail::PlanPtr plan(dim == 1 ? fftw_plan_dft_1d(n, buf, buf, sign, flags)
                                : fftw_plan_dft_2d(n, n, buf, buf, sign, flags));
  if (!plan) throw Error("dft_inplace: FFTW planning failed");
  fftw_execute(plan.get());
}

/// Samples of the field on the uniform physical grid x_j = j L / P per axis,
/// P = oversample * M (row-major for d = 2).
inline std::vector<cplx> to_physical(const FourierField& u, int oversample = 4) {
  detail::require(oversample >= 2, "to_physical: oversample must be >= 2");
  const int p = oversample * u.modes();
  const auto total = static_cast<std::size_t>(u.dim() == 1 ? p : p * p);
  std::vector<cplx> buf(total, cplx{});
  const auto amps = u.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (amps[i] == cplx{}) continue;
    const auto k = u.wavenumber(i);
    const int a = (k[0] % p + p) % p;
    if (u.dim() == 1) {
      buf[static_cast<std::size_t>(a)] += amps[i];
    } else {
      const int b = (k[1] % p + p) % p;
      buf[static_cast<std::size_t>(a) * p + b] += amps[i];
    }
  }
  dft_inplace(buf, p, u.dim(), FFTW_BACKWARD);
  return buf;
}

/// Averaged spatial L^q norm; q = 2 uses Plancherel, q = inf the grid max.
inline double lq_norm(const FourierField& u, double q, int oversample = 4) {
  detail::require(q >= 1.0, "lq_norm: q must be >= 1");
  if (q == 2.0) return u.l2_norm();
  const auto phys = to_physical(u, oversample);
  if (std::isinf(q)) {
    double m = 0.0;
    for (const auto& v : phys) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (const auto& v : phys) s += std::pow(std::abs(v), q);
  return std::pow(s / static_cast<double>(phys.size()), 1.0 / q);
}

/// Smooth radial profile equal to 1 on [0, 1] and 0 on [3/2, inf), glued by
/// the exp(-1/x) transition.
inline double lp_profile(double r) noexcept {
  if (r <= 1.0) return 1.0;
  if (r >= 1.5) return 0.0;
  const double u = (r - 1.0) / 0.5;
  const auto psi = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  const double a = psi(1.0 - u);
  const double b = psi(u);
  return a / (a + b);
}

/// Dyadic Littlewood-Paley blocks sampled on the frequency lattice of a field
/// geometry.
///
/// Inhomogeneous bank: block 0 is the profile itself and block k >= 1 is
/// profile(2^{-k} xi) - profile(2^{1-k} xi).  Homogeneous bank: the second
/// form for every k in Z that meets the lattice; the zero frequency is in no
/// block.
class LPFilterBank {
 public:
  LPFilterBank(const FourierField& geometry, bool homogeneous)
      : dim_(geometry.dim()),
        modes_(geometry.modes()),
        length_(geometry.length()),
        homogeneous_(homogeneous) {
    double xi_min = 0.0;
    double xi_max = 0.0;
    freq_.resize(geometry.size());
    for (std::size_t i = 0; i < geometry.size(); ++i) {
      const double xi = geometry.frequency(i);
      freq_[i] = xi;
      xi_max = std::max(xi_max, xi);
      if (xi > 0.0 && (xi_min == 0.0 || xi < xi_min)) xi_min = xi;
    }
    const int k_top = std::max(1, static_cast<int>(std::ceil(std::log2(std::max(xi_max, 1.0)))));
    int k_bottom = 0;
    if (homogeneous_) k_bottom = static_cast<int>(std::floor(1.0 + std::log2(xi_min / 1.5)));
    for (int k = k_bottom; k <= k_top; ++k) {
      std::vector<double> m(freq_.size(), 0.0);
      bool any = false;
      for (std::size_t i = 0; i < freq_.size(); ++i) {
        m[i] = block_value(k, freq_[i]);
        any = any || m[i] != 0.0;
      }
      if (!any) continue;
      blocks_.push_back(k);
      mult_.push_back(std::move(m));
    }
  }

  [[nodiscard]] bool homogeneous() const noexcept { return homogeneous_; }
  [[nodiscard]] const std::vector<int>& blocks() const noexcept { return blocks_; }
  [[nodiscard]] std::span<const double> multiplier(std::size_t b) const { return mult_.at(b); }

  [[nodiscard]] bool matches(const FourierField& u) const noexcept {
    return u.dim() == dim_ && u.modes() == modes_ && u.length() == length_;
  }

  /// Value of block k at radial frequency xi.
  [[nodiscard]] double block_value(int k, double xi) const noexcept {
    if (homogeneous_ && xi == 0.0) return 0.0;
    if (!homogeneous_ && k == 0) return lp_profile(xi);
    return lp_profile(std::ldexp(xi, -k)) - lp_profile(std::ldexp(xi, 1 - k));
  }

  /// S_k u for the b-th stored block.
  [[nodiscard]] FourierField apply(const FourierField& u, std::size_t b) const {
    detail::require(matches(u), "LPFilterBank: field geometry does not match the bank");
    FourierField out = u;
    auto amps = out.amplitudes();
    const auto& m = mult_.at(b);
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] *= m[i];
    return out;
  }

 private:
  int dim_;
  int modes_;
  double length_;
  bool homogeneous_;
  std::vector<double> freq_;
  std::vector<int> blocks_;
  std::vector<std::vector<double>> mult_;
};

}  // namespace tracelab::spaces
