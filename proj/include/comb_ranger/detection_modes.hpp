#pragma once

// Analytic detection modes w_i = (1/K_i) du/dp_i.
//
// Time parameters (phase, group and GVD delay) and air-ranging parameters
// (length L, density factor X, water-vapor pressure P_w). All coefficient
// vectors are real on the v_n basis.

#include <cmath>
#include <string>
#include <vector>

#include "comb_ranger/air_model.hpp"
#include "comb_ranger/constants.hpp"
#include "comb_ranger/mode_algebra.hpp"

namespace comb_ranger {

enum class Parameter { phase_delay, group_delay, gvd_delay, length, density, water_vapor };

inline std::string short_name(Parameter p) {
  switch (p) {
    case Parameter::phase_delay: return "phi";
    case Parameter::group_delay: return "g";
    case Parameter::gvd_delay: return "gvd";
    case Parameter::length: return "L";
    case Parameter::density: return "X";
    case Parameter::water_vapor: return "Pw";
  }
  return "?";
}

/// Unit of the parameter itself (the estimate a homodyne signal returns).
inline std::string parameter_unit(Parameter p) {
  switch (p) {
    case Parameter::phase_delay:
    case Parameter::group_delay:
    case Parameter::gvd_delay: return "s";
    case Parameter::length: return "m";
    case Parameter::density: return "1";
    case Parameter::water_vapor: return "Pa";
  }
  return "?";
}

struct DetectionMode {
  Parameter parameter;
  SpectralMode mode;  // unit norm
  double k_const;     // > 0, in (parameter unit)^-1
  std::vector<Parameter> purified_against{};

  bool is_purified() const { return !purified_against.empty(); }

  // ";" rather than "," so labels can sit in CSV cells and headers
  std::string label() const {
    std::string s = "w_" + short_name(parameter);
    if (is_purified()) {
      s += "^p[";
      for (std::size_t i = 0; i < purified_against.size(); ++i) {
        if (i) s += ";";
        s += short_name(purified_against[i]);
      }
      s += "]";
    }
    return s;
  }
};

struct TimeModes {
  DetectionMode phase;
  DetectionMode group;
  DetectionMode gvd;
};

/// w_phi = v0 (K = w0), w_g = v1 (K = dw),
/// w_gvd = v0/sqrt3 + sqrt(2/3) v2 (K = sqrt3 dw^2/w0).
inline TimeModes time_detection_modes(const GaussianPulse& pulse) {
  validate(pulse);
  const double w0 = pulse.omega0;
  const double dw = pulse.delta_omega;
  return TimeModes{
      {Parameter::phase_delay, hermite_gauss(0, pulse), w0},
      {Parameter::group_delay, hermite_gauss(1, pulse), dw},
      {Parameter::gvd_delay,
       mode_from_real(pulse, {1.0 / std::sqrt(3.0), 0.0, std::sqrt(2.0 / 3.0)}),
       std::sqrt(3.0) * dw * dw / w0},
  };
}

struct RangingModes {
  GaussianPulse pulse;
  double length_m;
  DispersionScalars scalars;
  DetectionMode length;
  DetectionMode density;
  DetectionMode water_vapor;
};

namespace detail {

/// Unnormalized (v0, v1, v2) bracket shared by w_X and w_Pw:
/// (w0 + dw^2/w0 (s1 + s2), dw (1 + s1), sqrt2 dw^2/w0 (s1 + s2)).
inline Coefficients dispersive_bracket(const GaussianPulse& p, double s1, double s2) {
  const double w0 = p.omega0;
  const double dw = p.delta_omega;
  Coefficients c(3);
  c[0] = w0 + dw * dw / w0 * (s1 + s2);
  c[1] = dw * (1.0 + s1);
  c[2] = std::sqrt(2.0) * dw * dw / w0 * (s1 + s2);
  return c;
}

}  // namespace detail

/// Detection modes of L, X and P_w from the second-order spectral phase.
/// w_L keeps the vacuum form (no v2 term); the state only enters through
/// validation since the normalized modes depend on the carrier alone.
inline RangingModes ranging_modes(const GaussianPulse& pulse, const AirState& state,
                                  double length_m) {
  validate(pulse);
  validate(state);
  if (!std::isfinite(length_m) || length_m <= 0.0) {
    throw ValidationError("length", "must be finite and positive");
  }
  const double w0 = pulse.omega0;
  const double dw = pulse.delta_omega;
  const Wavenumber sigma0 = Wavenumber::from_angular_frequency(w0);
  const auto scalars = dispersion_scalars(w0);

  const double kl = std::hypot(w0, dw) / kSpeedOfLight;
  const SpectralMode wl = mode_from_real(pulse, {w0, dw, 0.0}).normalized();

  const Coefficients bx = detail::dispersive_bracket(pulse, scalars.delta1, scalars.delta2);
  const double kx = k_dispersion(sigma0) * length_m / kSpeedOfLight * bx.norm();
  const SpectralMode wx(pulse, bx / bx.norm());

  const Coefficients bp = detail::dispersive_bracket(pulse, scalars.eta1, scalars.eta2);
  const double kp = water_term(sigma0) * length_m / kSpeedOfLight * bp.norm();
  const SpectralMode wp(pulse, -bp / bp.norm());

  return RangingModes{pulse,
                      length_m,
                      scalars,
                      {Parameter::length, wl, kl},
                      {Parameter::density, wx, kx},
                      {Parameter::water_vapor, wp, kp}};
}

}  // namespace comb_ranger
