#pragma once

// Spectral modes of a Gaussian frequency comb envelope.
//
// Every mode is stored as coefficients on the Hermite-Gauss basis
//   v_n(w) = i He_n(x) / sqrt(n!) u(w),   x = (w - w0) / dw,
//   u(w)   = (2 pi)^(-1/4) dw^(-1/2) exp(-x^2 / 4),
// so inner products are exact in coefficient space. Sampled forms are
// derived on demand and only feed the quadrature oracle and exports.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "comb_ranger/constants.hpp"
#include "comb_ranger/errors.hpp"

namespace comb_ranger {

using Complex = std::complex<double>;
using Coefficients = Eigen::VectorXcd;

inline constexpr std::size_t kDefaultMaxOrder = 8;
inline constexpr Complex kI{0.0, 1.0};

/// Carrier frequency and spectral standard deviation of |u|^2, both rad/s.
struct GaussianPulse {
  double omega0 = 0.0;
  double delta_omega = 0.0;

  bool operator==(const GaussianPulse&) const = default;
};

inline void validate(const GaussianPulse& p) {
  if (!std::isfinite(p.omega0) || p.omega0 <= 0.0) {
    throw ValidationError("omega0", "must be finite and positive");
  }
  if (!std::isfinite(p.delta_omega) || p.delta_omega <= 0.0) {
    throw ValidationError("delta_omega", "must be finite and positive");
  }
  if (p.delta_omega > 0.5 * p.omega0) {
    throw ValidationError("delta_omega",
                          "must not exceed omega0/2 for the second-order "
                          "spectral phase expansion");
  }
}

/// Pulse centred on a vacuum wavelength with delta_omega = omega0 * fraction.
inline GaussianPulse pulse_at_wavelength(double wavelength_m,
                                         double bandwidth_fraction) {
  const double w0 = angular_frequency_of_wavelength(wavelength_m);
  GaussianPulse p{w0, w0 * bandwidth_fraction};
  validate(p);
  return p;
}

/// Intensity FWHM (s) of the Fourier-limited pulse.
inline double intensity_fwhm(const GaussianPulse& p) {
  // |E(t)|^2 ~ exp(-2 dw^2 t^2)
  return std::sqrt(2.0 * std::log(2.0)) / p.delta_omega;
}

/// Normalized Hermite functions h_n(x) = He_n(x)/sqrt(n!) for n = 0..max_order.
inline std::vector<double> normalized_hermite(double x, std::size_t max_order) {
  std::vector<double> h(max_order + 1);
  h[0] = 1.0;
  if (max_order >= 1) h[1] = x;
  for (std::size_t n = 1; n < max_order; ++n) {
    h[n + 1] = (x * h[n] - std::sqrt(static_cast<double>(n)) * h[n - 1]) /
               std::sqrt(static_cast<double>(n + 1));
  }
  return h;
}

/// Mean-field envelope u(w); real and positive.
inline double gaussian_envelope(const GaussianPulse& p, double omega) {
  const double x = (omega - p.omega0) / p.delta_omega;
  return std::exp(-0.25 * x * x) /
         (std::sqrt(p.delta_omega) * std::pow(2.0 * std::numbers::pi, 0.25));
}

class SpectralMode {
public:
  SpectralMode(GaussianPulse pulse, Coefficients coefficients)
      : pulse_(pulse), coefficients_(std::move(coefficients)) {
    validate(pulse_);
    if (coefficients_.size() == 0) coefficients_ = Coefficients::Zero(1);
  }

  const GaussianPulse& pulse() const noexcept { return pulse_; }
  const Coefficients& coefficients() const noexcept { return coefficients_; }
  std::size_t order() const noexcept {
    return static_cast<std::size_t>(coefficients_.size()) - 1;
  }

  /// Coefficient on v_k; zero past the stored order.
  Complex coefficient(std::size_t k) const {
    return k < static_cast<std::size_t>(coefficients_.size()) ? coefficients_[k]
                                                              : Complex{};
  }

  double squared_norm() const { return coefficients_.squaredNorm(); }
  double norm() const { return coefficients_.norm(); }

  SpectralMode normalized() const {
    const double n = norm();
    if (n == 0.0) throw DomainError("cannot normalize the zero mode");
    return SpectralMode(pulse_, coefficients_ / n);
  }

  bool is_normalized(double tol = 1e-12) const {
    return std::abs(squared_norm() - 1.0) <= tol;
  }

  /// Amplitude at one frequency.
  Complex operator()(double omega) const {
    const double x = (omega - pulse_.omega0) / pulse_.delta_omega;
    const auto h = normalized_hermite(x, order());
    Complex acc{};
    for (std::size_t k = 0; k <= order(); ++k) acc += coefficients_[k] * h[k];
    return kI * acc * gaussian_envelope(pulse_, omega);
  }

  friend SpectralMode operator+(const SpectralMode& a, const SpectralMode& b) {
    require_same_pulse(a, b);
    const auto n = std::max(a.coefficients_.size(), b.coefficients_.size());
    Coefficients c = Coefficients::Zero(n);
    c.head(a.coefficients_.size()) += a.coefficients_;
    c.head(b.coefficients_.size()) += b.coefficients_;
    return SpectralMode(a.pulse_, std::move(c));
  }

  friend SpectralMode operator-(const SpectralMode& a, const SpectralMode& b) {
    return a + Complex{-1.0} * b;
  }

  friend SpectralMode operator*(Complex s, const SpectralMode& m) {
    return SpectralMode(m.pulse_, s * m.coefficients_);
  }

  friend SpectralMode operator*(double s, const SpectralMode& m) {
    return Complex{s} * m;
  }

  friend Complex inner_product(const SpectralMode& f, const SpectralMode& g);

  static void require_same_pulse(const SpectralMode& a, const SpectralMode& b) {
    if (!(a.pulse_ == b.pulse_)) {
      throw ValidationError("pulse",
                            "modes live on different Hermite-Gauss bases");
    }
  }

private:
  GaussianPulse pulse_;
  Coefficients coefficients_;
};

/// <f, g> = sum_k conj(f_k) g_k. Conjugate-linear in f.
inline Complex inner_product(const SpectralMode& f, const SpectralMode& g) {
  SpectralMode::require_same_pulse(f, g);
  const auto n = std::min(f.coefficients_.size(), g.coefficients_.size());
  return f.coefficients_.head(n).dot(g.coefficients_.head(n));
}

/// Real part of <f, g>. All detection modes have real coefficients, so this
/// is the quantity the homodyne algebra works with.
inline double overlap(const SpectralMode& f, const SpectralMode& g) {
  return inner_product(f, g).real();
}

inline SpectralMode hermite_gauss(std::size_t n, const GaussianPulse& pulse,
                                  std::size_t max_order = kDefaultMaxOrder) {
  if (n > max_order) {
    throw ValidationError("order", "Hermite-Gauss order " + std::to_string(n) +
                                       " exceeds the configured maximum " +
                                       std::to_string(max_order));
  }
  Coefficients c = Coefficients::Zero(static_cast<Eigen::Index>(n) + 1);
  c[static_cast<Eigen::Index>(n)] = 1.0;
  return SpectralMode(pulse, std::move(c));
}

/// The mean-field mode u = -i v0.
inline SpectralMode gaussian_mode(const GaussianPulse& pulse) {
  Coefficients c(1);
  c[0] = -kI;
  return SpectralMode(pulse, std::move(c));
}

/// Mode from real coefficients on v_0, v_1, ...
inline SpectralMode mode_from_real(const GaussianPulse& pulse,
                                   std::initializer_list<double> coeffs) {
  Coefficients c(static_cast<Eigen::Index>(coeffs.size()));
  Eigen::Index k = 0;
  for (double v : coeffs) c[k++] = v;
  return SpectralMode(pulse, std::move(c));
}

// ---------------------------------------------------------------------------
// Sampled representation

struct SpectralGrid {
  double start = 0.0;
  double step = 0.0;
  std::size_t count = 0;

  double omega(std::size_t i) const { return start + step * static_cast<double>(i); }
  double stop() const { return omega(count - 1); }
  bool operator==(const SpectralGrid&) const = default;
};

inline constexpr double kQuadratureHalfWidth = 8.0;  // in units of delta_omega
inline constexpr std::size_t kMinQuadraturePoints = 2048;
inline constexpr std::size_t kDefaultQuadraturePoints = 4097;

/// Uniform grid over w0 +- half_width * dw.
inline SpectralGrid make_grid(const GaussianPulse& pulse,
                              std::size_t count = kDefaultQuadraturePoints,
                              double half_width = kQuadratureHalfWidth) {
  validate(pulse);
  if (count < 3) throw ValidationError("grid", "need at least three points");
  const double lo = pulse.omega0 - half_width * pulse.delta_omega;
  const double hi = pulse.omega0 + half_width * pulse.delta_omega;
  return SpectralGrid{lo, (hi - lo) / static_cast<double>(count - 1), count};
}

struct SampledSpectrum {
  GaussianPulse pulse;
  SpectralGrid grid;
  std::vector<Complex> values;
};

inline SampledSpectrum sample(const SpectralMode& mode, const SpectralGrid& grid) {
  SampledSpectrum out{mode.pulse(), grid, {}};
  out.values.reserve(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) out.values.push_back(mode(grid.omega(i)));
  return out;
}

inline SampledSpectrum sample(const SpectralMode& mode) {
  return sample(mode, make_grid(mode.pulse()));
}

inline void require_quadrature_ready(const SampledSpectrum& s) {
  if (s.values.size() != s.grid.count) {
    throw ValidationError("grid", "sample count does not match grid");
  }
  if (s.grid.count < kMinQuadraturePoints) {
    throw ValidationError("grid", "quadrature needs at least 2048 points");
  }
  // half-step slack absorbs rounding in the grid endpoints
  const double lo =
      s.pulse.omega0 - kQuadratureHalfWidth * s.pulse.delta_omega + 0.5 * s.grid.step;
  const double hi =
      s.pulse.omega0 + kQuadratureHalfWidth * s.pulse.delta_omega - 0.5 * s.grid.step;
  if (s.grid.start > lo || s.grid.stop() < hi) {
    throw ValidationError("grid", "does not cover omega0 +- 8 delta_omega");
  }
}

/// Composite Simpson (odd point count) or trapezoid rule for sum f*(w) g(w) dw.
inline Complex quadrature_inner_product(const SampledSpectrum& f,
                                        const SampledSpectrum& g) {
  if (!(f.grid == g.grid) || !(f.pulse == g.pulse)) {
    throw ValidationError("grid", "spectra sampled on different grids");
  }
  require_quadrature_ready(f);
  require_quadrature_ready(g);
  const std::size_t n = f.grid.count;
  Complex acc{};
  if (n % 2 == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      acc += w * std::conj(f.values[i]) * g.values[i];
    }
    return acc * (f.grid.step / 3.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    acc += w * std::conj(f.values[i]) * g.values[i];
  }
  return acc * f.grid.step;
}

/// Hermite-Gauss coefficients of a sampled spectrum by quadrature.
inline SpectralMode project(const SampledSpectrum& s,
                            std::size_t max_order = kDefaultMaxOrder) {
  require_quadrature_ready(s);
  Coefficients c = Coefficients::Zero(static_cast<Eigen::Index>(max_order) + 1);
  for (std::size_t k = 0; k <= max_order; ++k) {
    const auto basis = sample(hermite_gauss(k, s.pulse, max_order), s.grid);
    c[static_cast<Eigen::Index>(k)] = quadrature_inner_product(basis, s);
  }
  return SpectralMode(s.pulse, std::move(c));
}

/// Real amplitude profile with the mode's global phase removed, scaled by
/// sqrt(dw) so that sum profile^2 dx = norm^2 over x = (w - w0)/dw.
/// The reference phase is that of i * c_k for the dominant coefficient.
inline double profile_amplitude(const SpectralMode& mode, double omega) {
  Eigen::Index dominant = 0;
  mode.coefficients().cwiseAbs().maxCoeff(&dominant);
  const Complex ref = kI * mode.coefficients()[dominant];
  const Complex phase = std::abs(ref) > 0.0 ? ref / std::abs(ref) : Complex{1.0};
  return (std::conj(phase) * mode(omega)).real() *
         std::sqrt(mode.pulse().delta_omega);
}

/// Two-column export: normalized frequency (w - w0)/dw, amplitude.
inline void write_profile(std::ostream& os, const SpectralMode& mode,
                          const SpectralGrid& grid) {
  const auto& p = mode.pulse();
  char line[96];
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double w = grid.omega(i);
    std::snprintf(line, sizeof line, "%.9g,%.12e\n", (w - p.omega0) / p.delta_omega,
                  profile_amplitude(mode, w));
    os << line;
  }
}

// ---------------------------------------------------------------------------
// Gram-Schmidt

/// Minimum squared residual of a normalized input after projecting out the
/// preceding ones (the ratio of successive Gram determinants).
inline constexpr double kDependenceThreshold = 1e-12;

/// Orthonormalize in order. The k-th output depends only on the first k
/// inputs. Classical Gram-Schmidt with one reorthogonalization pass.
inline std::vector<SpectralMode> gram_schmidt(std::span<const SpectralMode> modes) {
  std::vector<SpectralMode> basis;
  basis.reserve(modes.size());
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (!basis.empty()) SpectralMode::require_same_pulse(basis.front(), modes[k]);
    const double input_norm = modes[k].norm();
    if (input_norm == 0.0) {
      throw DependenceError(k, "gram_schmidt: input " + std::to_string(k) +
                                   " is the zero mode");
    }
    SpectralMode r = (1.0 / input_norm) * modes[k];
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) r = r - inner_product(q, r) * q;
    }
    const double residual2 = r.squared_norm();
    if (residual2 <= kDependenceThreshold) {
      throw DependenceError(k, "gram_schmidt: input " + std::to_string(k) +
                                   " is linearly dependent on the preceding "
                                   "inputs (squared residual " +
                                   std::to_string(residual2) + ")");
    }
    basis.push_back((1.0 / std::sqrt(residual2)) * r);
  }
  return basis;
}

inline std::vector<SpectralMode> gram_schmidt(std::initializer_list<SpectralMode> modes) {
  return gram_schmidt(std::span<const SpectralMode>(modes.begin(), modes.size()));
}

}  // namespace comb_ranger
