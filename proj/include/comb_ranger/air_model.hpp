#pragma once

// Refractive index of air after the updated Edlen formula of Boensch and
// Potulski, with closed-form wavenumber derivatives.
//
//   n_phase - 1 = K(sigma) X(T, P, x) - g(sigma) P_w
//   n_group - 1 = (K + sigma K') X - (g + sigma g') P_w
//
// sigma is in inverse micrometers, T in degrees Celsius, P and P_w in pascal,
// x (CO2 content) in percent.

#include <cmath>
#include <string>

#include "comb_ranger/constants.hpp"
#include "comb_ranger/errors.hpp"

namespace comb_ranger {

namespace edlen {
inline constexpr double A = 8091.37;
inline constexpr double B = 2333983.0;
inline constexpr double C = 15518.0;
// Published Boensch-Potulski value. Some reprints carry 932164.60, which
// undershoots n - 1 of standard air by a factor of ten.
inline constexpr double D = 93214.60;
inline constexpr double E = 0.5953;
inline constexpr double F = 0.009876;
inline constexpr double G = 0.0036610;
inline constexpr double H = 0.5327;
inline constexpr double I = 3.802;
inline constexpr double J = 0.0384;

inline constexpr double kUvPole = 130.0;  // sigma^2, um^-2
inline constexpr double kIrPole = 38.9;   // sigma^2, um^-2
inline constexpr double kPoleGuard = 1e-6;
inline constexpr double kReferenceCo2 = 0.04;  // percent
}  // namespace edlen

inline constexpr double kMinTemperatureC = -40.0;
inline constexpr double kMaxTemperatureC = 100.0;

/// Vacuum wavenumber sigma = 1/lambda in um^-1.
class Wavenumber {
public:
  explicit Wavenumber(double per_micrometer) : sigma_(per_micrometer) {
    if (!std::isfinite(sigma_) || sigma_ < 0.0) {
      throw DomainError("wavenumber must be finite and non-negative, got " +
                        std::to_string(sigma_));
    }
    if (sigma_ * sigma_ >= edlen::kIrPole - edlen::kPoleGuard) {
      throw DomainError("wavenumber " + std::to_string(sigma_) +
                        " um^-1 at or beyond the 38.9 um^-2 resonance pole");
    }
  }

  static Wavenumber from_wavelength(double wavelength_m) {
    return Wavenumber(1e-6 / wavelength_m);
  }

  static Wavenumber from_angular_frequency(double omega) {
    return Wavenumber(omega / (kTwoPi * kSpeedOfLight) * 1e-6);
  }

  double per_micrometer() const noexcept { return sigma_; }
  double angular_frequency() const noexcept {
    return sigma_ * 1e6 * kTwoPi * kSpeedOfLight;
  }

private:
  double sigma_;
};

/// d(sigma)/d(omega) with sigma in um^-1 and omega in rad/s.
inline constexpr double kSigmaPerOmega = 1e-6 / (kTwoPi * kSpeedOfLight);

struct AirState {
  double temperature_c = 20.0;
  double pressure_pa = 101325.0;
  double co2_percent = 0.04;
  double water_vapor_pa = 0.0;

  bool operator==(const AirState&) const = default;
};

/// 20 degC, 101325 Pa, 0.04 % CO2, dry.
inline AirState standard_air() { return AirState{}; }

inline AirState vacuum() {
  return AirState{.temperature_c = 20.0, .pressure_pa = 0.0,
                  .co2_percent = 0.04, .water_vapor_pa = 0.0};
}

inline void validate(const AirState& s) {
  if (!std::isfinite(s.temperature_c) || s.temperature_c < kMinTemperatureC ||
      s.temperature_c > kMaxTemperatureC) {
    throw ValidationError("temperature",
                          "must lie in [-40, 100] degC, got " +
                              std::to_string(s.temperature_c));
  }
  if (!std::isfinite(s.pressure_pa) || s.pressure_pa < 0.0) {
    throw ValidationError("pressure", "must be finite and >= 0 Pa");
  }
  if (!std::isfinite(s.co2_percent) || s.co2_percent < 0.0 ||
      s.co2_percent > 100.0) {
    throw ValidationError("co2", "must lie in [0, 100] percent");
  }
  if (!std::isfinite(s.water_vapor_pa) || s.water_vapor_pa < 0.0) {
    throw ValidationError("water_vapor_pressure", "must be finite and >= 0 Pa");
  }
  if (s.water_vapor_pa > s.pressure_pa) {
    throw ValidationError("water_vapor_pressure",
                          "must not exceed the total pressure");
  }
}

/// Value and first two derivatives of a scalar function of one variable.
struct Derivatives {
  double value;
  double first;
  double second;
};

/// K(sigma) and its sigma-derivatives. K is even in sigma.
inline Derivatives k_derivatives(Wavenumber sigma) {
  const double s = sigma.per_micrometer();
  const double s2 = s * s;
  const double uv = edlen::kUvPole - s2;
  const double ir = edlen::kIrPole - s2;
  if (std::abs(uv) < edlen::kPoleGuard || std::abs(ir) < edlen::kPoleGuard) {
    throw DomainError("K(sigma): sigma^2 within 1e-6 of a resonance pole");
  }
  using namespace edlen;
  const double value = 1e-8 * (A + B / uv + C / ir);
  const double first = 1e-8 * (2.0 * B * s / (uv * uv) + 2.0 * C * s / (ir * ir));
  const double second =
      1e-8 * (2.0 * B / (uv * uv) + 8.0 * B * s2 / (uv * uv * uv) +
              2.0 * C / (ir * ir) + 8.0 * C * s2 / (ir * ir * ir));
  return {value, first, second};
}

inline double k_dispersion(Wavenumber sigma) { return k_derivatives(sigma).value; }

/// g(sigma) = 1e-10 (I - J sigma^2), per pascal.
inline Derivatives g_derivatives(Wavenumber sigma) {
  const double s = sigma.per_micrometer();
  return {1e-10 * (edlen::I - edlen::J * s * s), -2e-10 * edlen::J * s,
          -2e-10 * edlen::J};
}

inline double water_term(Wavenumber sigma) { return g_derivatives(sigma).value; }

/// Density factor X(T, P, x). Dimensionless; zero at zero pressure.
inline double density_factor(const AirState& s) {
  validate(s);
  using namespace edlen;
  const double t = s.temperature_c;
  const double p = s.pressure_pa;
  return p / D * (1.0 + 1e-8 * (E - F * t) * p) / (1.0 + G * t) *
         (1.0 + H * (s.co2_percent - kReferenceCo2));
}

/// The two quantities the index actually depends on. Perturbation studies
/// work on this directly so X and P_w can be varied independently.
struct Medium {
  double density_factor = 0.0;
  double water_vapor_pa = 0.0;

  bool operator==(const Medium&) const = default;
};

inline Medium medium_of(const AirState& s) {
  return Medium{density_factor(s), s.water_vapor_pa};
}

/// n_phase - 1.
inline double phase_refractivity(Wavenumber sigma, const Medium& m) {
  return k_dispersion(sigma) * m.density_factor -
         water_term(sigma) * m.water_vapor_pa;
}

/// n_group - 1.
inline double group_refractivity(Wavenumber sigma, const Medium& m) {
  const double s = sigma.per_micrometer();
  const auto k = k_derivatives(sigma);
  const auto g = g_derivatives(sigma);
  return (k.value + s * k.first) * m.density_factor -
         (g.value + s * g.first) * m.water_vapor_pa;
}

inline double phase_index(Wavenumber sigma, const Medium& m) {
  return 1.0 + phase_refractivity(sigma, m);
}

inline double phase_index(Wavenumber sigma, const AirState& s) {
  return phase_index(sigma, medium_of(s));
}

inline double group_index(Wavenumber sigma, const Medium& m) {
  return 1.0 + group_refractivity(sigma, m);
}

inline double group_index(Wavenumber sigma, const AirState& s) {
  return group_index(sigma, medium_of(s));
}

/// Phase refractivity n - 1 and its sigma-derivatives.
inline Derivatives refractivity_derivatives(Wavenumber sigma, const Medium& m) {
  const auto k = k_derivatives(sigma);
  const auto g = g_derivatives(sigma);
  const double x = m.density_factor;
  const double pw = m.water_vapor_pa;
  return {k.value * x - g.value * pw, k.first * x - g.first * pw,
          k.second * x - g.second * pw};
}

/// Dimensionless dispersion characteristics of K and g at a carrier:
///   delta1 = w K'/K, delta2 = w^2 K''/(2K), eta1 = w g'/g, eta2 = w^2 g''/(2g)
/// with primes taken in angular frequency. Because sigma is proportional to
/// omega, w d/dw == sigma d/dsigma and the chain rule reduces to this form.
struct DispersionScalars {
  double delta1;
  double delta2;
  double eta1;
  double eta2;
};

inline DispersionScalars dispersion_scalars(double omega0) {
  const Wavenumber sigma = Wavenumber::from_angular_frequency(omega0);
  const double s = sigma.per_micrometer();
  const auto k = k_derivatives(sigma);
  const auto g = g_derivatives(sigma);
  // omega derivatives via d/domega = kSigmaPerOmega d/dsigma
  const double kw1 = k.first * kSigmaPerOmega;
  const double kw2 = k.second * kSigmaPerOmega * kSigmaPerOmega;
  const double gw1 = g.first * kSigmaPerOmega;
  const double gw2 = g.second * kSigmaPerOmega * kSigmaPerOmega;
  if (g.value == 0.0) {
    throw DomainError("eta scalars undefined where g(sigma) = 0 (sigma = " +
                      std::to_string(s) + ")");
  }
  return {omega0 * kw1 / k.value, omega0 * omega0 * kw2 / (2.0 * k.value),
          omega0 * gw1 / g.value, omega0 * omega0 * gw2 / (2.0 * g.value)};
}

}  // namespace comb_ranger
