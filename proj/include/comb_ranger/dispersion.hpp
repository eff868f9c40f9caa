#pragma once

// Spectral-phase propagation through air.
//
// Exact propagation multiplies the spectrum by exp(i n(w) w L / c). Around
// the carrier the phase expands as
//   w0 t_phi + (w - w0) t_g + (w - w0)^2 / w0 t_gvd
// and to first order in a parameter offset p the field becomes
//   u + sum_i p_i K_i w_i
// with the detection modes of detection_modes.hpp.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string>

#include "comb_ranger/air_model.hpp"
#include "comb_ranger/constants.hpp"
#include "comb_ranger/detection_modes.hpp"
#include "comb_ranger/errors.hpp"
#include "comb_ranger/mode_algebra.hpp"

namespace comb_ranger {

struct DelayTriple {
  double t_phi;  // s
  double t_g;    // s
  double t_gvd;  // s
};

inline void validate_length(double length_m) {
  if (!std::isfinite(length_m) || length_m <= 0.0) {
    throw ValidationError("length", "must be finite and positive");
  }
}

inline DelayTriple expansion_times(const Medium& medium, double length_m, double omega0) {
  validate_length(length_m);
  const auto r = refractivity_derivatives(Wavenumber::from_angular_frequency(omega0), medium);
  const double n = 1.0 + r.value;
  const double dn = r.first * kSigmaPerOmega;
  const double d2n = r.second * kSigmaPerOmega * kSigmaPerOmega;
  const double tau = length_m / kSpeedOfLight;
  return DelayTriple{n * tau, (n + omega0 * dn) * tau,
                     omega0 * (dn + 0.5 * omega0 * d2n) * tau};
}

inline DelayTriple expansion_times(const AirState& state, double length_m, double omega0) {
  return expansion_times(medium_of(state), length_m, omega0);
}

/// The second-order phase at one frequency.
inline double expanded_phase(const DelayTriple& t, double omega0, double omega) {
  const double y = omega - omega0;
  return omega0 * t.t_phi + y * t.t_g + y * y / omega0 * t.t_gvd;
}

/// Exact propagation phase n(w) w L / c.
inline double propagation_phase(double omega, const Medium& medium, double length_m) {
  if (!(omega > 0.0)) {
    throw DomainError("propagation at non-positive frequency " + std::to_string(omega));
  }
  return phase_index(Wavenumber::from_angular_frequency(omega), medium) * omega *
         length_m / kSpeedOfLight;
}

/// phase(medium_a, L_a) - phase(medium_b, L_b) without forming the two large
/// phases separately.
inline double propagation_phase_difference(double omega, const Medium& a, double length_a,
                                           const Medium& b, double length_b) {
  if (!(omega > 0.0)) {
    throw DomainError("propagation at non-positive frequency " + std::to_string(omega));
  }
  const Wavenumber s = Wavenumber::from_angular_frequency(omega);
  const double optical = (length_a - length_b) + phase_refractivity(s, a) * length_a -
                         phase_refractivity(s, b) * length_b;
  return omega * optical / kSpeedOfLight;
}

/// Multiply each sample by exp(i phase(w)). Samples that are exactly zero
/// are passed through without evaluating the phase.
inline SampledSpectrum apply_phase(const SampledSpectrum& input,
                                   const std::function<double(double)>& phase) {
  SampledSpectrum out = input;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (out.values[i] == Complex{}) continue;
    out.values[i] *= std::polar(1.0, phase(input.grid.omega(i)));
  }
  return out;
}

/// E(w) -> E(w) exp(i n(w) w L / c), exact (unexpanded) phase.
inline SampledSpectrum apply_spectral_phase(const SampledSpectrum& input,
                                            const Medium& medium, double length_m) {
  validate_length(length_m);
  return apply_phase(input, [&](double w) { return propagation_phase(w, medium, length_m); });
}

inline SampledSpectrum apply_spectral_phase(const SampledSpectrum& input,
                                            const AirState& state, double length_m) {
  return apply_spectral_phase(input, medium_of(state), length_m);
}

// ---------------------------------------------------------------------------
// First-order field

/// Largest phase excursion allowed for the first-order field, over w0 +- 2 dw.
inline constexpr double kLinearityGuardRad = 0.1;
inline constexpr double kGuardBandHalfWidth = 2.0;

struct TimePerturbation {
  double phase_delay = 0.0;  // s
  double group_delay = 0.0;  // s
  double gvd_delay = 0.0;    // s
};

struct RangingPerturbation {
  double length_m = 0.0;
  double density = 0.0;         // offset of X, dimensionless
  double water_vapor_pa = 0.0;  // Pa
};

inline double phase_excursion(const GaussianPulse& pulse, const TimePerturbation& p) {
  const double w0 = pulse.omega0;
  const double ymax = kGuardBandHalfWidth * pulse.delta_omega;
  auto f = [&](double y) {
    return std::abs(p.phase_delay * w0 + p.group_delay * y + p.gvd_delay * y * y / w0);
  };
  double m = std::max(f(-ymax), f(ymax));
  if (p.gvd_delay != 0.0) {
    const double vertex = -p.group_delay * w0 / (2.0 * p.gvd_delay);
    if (std::abs(vertex) < ymax) m = std::max(m, f(vertex));
  }
  return m;
}

inline double phase_excursion(const GaussianPulse& pulse, double length_m,
                              const RangingPerturbation& p) {
  constexpr int kPoints = 65;
  const double lo = pulse.omega0 - kGuardBandHalfWidth * pulse.delta_omega;
  const double hi = pulse.omega0 + kGuardBandHalfWidth * pulse.delta_omega;
  double m = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double w = lo + (hi - lo) * i / (kPoints - 1);
    const Wavenumber s = Wavenumber::from_angular_frequency(w);
    const double dphi =
        w / kSpeedOfLight *
        (p.length_m + length_m * (p.density * k_dispersion(s) - p.water_vapor_pa * water_term(s)));
    m = std::max(m, std::abs(dphi));
  }
  return m;
}

inline void require_linear(double excursion) {
  if (!(excursion < kLinearityGuardRad)) {
    throw DomainError("perturbation moves the spectral phase by " +
                      std::to_string(excursion) +
                      " rad over w0 +- 2 dw (limit 0.1 rad); use exact propagation");
  }
}

/// u + sum_i p_i K_i w_i, no guard.
inline SpectralMode linearized_field(const SpectralMode& mean_field,
                                     std::span<const DetectionMode> modes,
                                     std::span<const double> offsets) {
  if (modes.size() != offsets.size()) {
    throw ValidationError("perturbation", "one offset per detection mode required");
  }
  SpectralMode field = mean_field;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (offsets[i] == 0.0) continue;
    field = field + (offsets[i] * modes[i].k_const) * modes[i].mode;
  }
  return field;
}

inline SpectralMode linearized_field(const GaussianPulse& pulse, const TimePerturbation& p) {
  require_linear(phase_excursion(pulse, p));
  const auto m = time_detection_modes(pulse);
  const std::array modes{m.phase, m.group, m.gvd};
  const std::array offsets{p.phase_delay, p.group_delay, p.gvd_delay};
  return linearized_field(gaussian_mode(pulse), modes, offsets);
}

inline SpectralMode linearized_field(const RangingModes& m, const RangingPerturbation& p) {
  require_linear(phase_excursion(m.pulse, m.length_m, p));
  const std::array modes{m.length, m.density, m.water_vapor};
  const std::array offsets{p.length_m, p.density, p.water_vapor_pa};
  return linearized_field(gaussian_mode(m.pulse), modes, offsets);
}

}  // namespace comb_ranger
