#pragma once

// Homodyne detection with shaped local oscillators: purification, signals,
// shot-noise sensitivities and the air-ranging contamination report.

#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "comb_ranger/air_model.hpp"
#include "comb_ranger/detection_modes.hpp"
#include "comb_ranger/dispersion.hpp"
#include "comb_ranger/errors.hpp"
#include "comb_ranger/mode_algebra.hpp"

namespace comb_ranger {

// ---------------------------------------------------------------------------
// Purification

/// Re-orthogonalize `target` against the span of `against`. The result
/// measures only the target parameter; K^p = K <w^p, w> <= K.
inline DetectionMode purify(const DetectionMode& target,
                            std::span<const DetectionMode> against) {
  if (against.empty()) return target;
  std::vector<SpectralMode> interferers;
  interferers.reserve(against.size());
  for (const auto& a : against) interferers.push_back(a.mode);
  const auto basis = gram_schmidt(interferers);

  SpectralMode r = target.mode.normalized();
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) r = r - inner_product(q, r) * q;
  }
  const double residual2 = r.squared_norm();
  if (residual2 <= kDependenceThreshold) {
    throw DomainError("parameter not separable: " + target.label() +
                      " lies in the span of the interfering modes");
  }
  DetectionMode out{target.parameter, (1.0 / std::sqrt(residual2)) * r, 0.0, {}};
  out.k_const = target.k_const * overlap(out.mode, target.mode);
  for (const auto& a : against) out.purified_against.push_back(a.parameter);
  return out;
}

inline DetectionMode purify(const DetectionMode& target,
                            std::initializer_list<DetectionMode> against) {
  return purify(target, std::span<const DetectionMode>(against.begin(), against.size()));
}

// ---------------------------------------------------------------------------
// Signals and sensitivities

/// Parameter estimate from a homodyne measurement with LO `lo`:
/// (1/K) Re<field, w> minus the unperturbed offset.
inline double homodyne_signal(const SpectralMode& field, const DetectionMode& lo) {
  const SpectralMode u = gaussian_mode(field.pulse());
  return (overlap(field, lo.mode) - overlap(u, lo.mode)) / lo.k_const;
}

/// Coefficient of p_j in the signal measured with LO w_i:
/// (K_j / K_i) <w_i, w_j>.
inline double cross_signal(const DetectionMode& lo, const DetectionMode& source) {
  return source.k_const / lo.k_const * overlap(lo.mode, source.mode);
}

/// Smallest detectable parameter value at the coherent-state Cramer-Rao
/// bound, 1 / (2 sqrt(N) K).
inline double min_detectable(double k_const, double photon_number) {
  if (!std::isfinite(photon_number) || photon_number < 1.0) {
    throw ValidationError("photons", "photon number must be >= 1");
  }
  if (!std::isfinite(k_const) || k_const <= 0.0) {
    throw ValidationError("k_const", "normalization constant must be positive");
  }
  return 1.0 / (2.0 * std::sqrt(photon_number) * k_const);
}

/// One row of the time-parameter summary (detection and purified modes).
struct ModeSummaryRow {
  DetectionMode mode;
  double p_min;  // s
};

/// w_phi, w_phi^p, w_g, w_gvd, w_gvd^p with their shot-noise limits.
inline std::vector<ModeSummaryRow> time_mode_summary(const GaussianPulse& pulse,
                                                     double photon_number) {
  const auto m = time_detection_modes(pulse);
  const auto phi_p = purify(m.phase, {m.group, m.gvd});
  const auto gvd_p = purify(m.gvd, {m.phase, m.group});
  std::vector<ModeSummaryRow> rows;
  for (const auto& d : {m.phase, phi_p, m.group, m.gvd, gvd_p}) {
    rows.push_back({d, min_detectable(d.k_const, photon_number)});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Finite-difference oracle

struct NumericModeOptions {
  /// Parameter step; empty picks the step that moves the phase by 1e-3 rad.
  std::optional<double> step;
  std::size_t grid_points = kDefaultQuadraturePoints;
  std::size_t max_order = kDefaultMaxOrder;
};

inline constexpr double kOracleTargetPhase = 1e-3;
inline constexpr double kOracleNoiseFloorPhase = 1e-7;

/// Detection mode estimated by central differences of exactly propagated
/// spectra, projected on the Hermite-Gauss basis. Spectral content at
/// non-physical frequencies (w <= 0) is dropped from the input field.
inline DetectionMode numeric_detection_mode(Parameter parameter, const GaussianPulse& pulse,
                                            const AirState& state, double length_m,
                                            const NumericModeOptions& opt = {}) {
  validate(pulse);
  validate(state);
  validate_length(length_m);
  const Medium medium = medium_of(state);
  const double w0 = pulse.omega0;

  // phase offset relative to the reference propagation for a parameter step h
  auto offset = [&](double h) -> std::function<double(double)> {
    switch (parameter) {
      case Parameter::phase_delay: return [=](double) { return w0 * h; };
      case Parameter::group_delay: return [=](double w) { return (w - w0) * h; };
      case Parameter::gvd_delay: return [=](double w) { return (w - w0) * (w - w0) / w0 * h; };
      case Parameter::length:
        return [=](double w) {
          return propagation_phase_difference(w, medium, length_m + h, medium, length_m);
        };
      case Parameter::density:
        return [=](double w) {
          Medium m = medium;
          m.density_factor += h;
          return propagation_phase_difference(w, m, length_m, medium, length_m);
        };
      case Parameter::water_vapor:
        return [=](double w) {
          Medium m = medium;
          m.water_vapor_pa += h;
          return propagation_phase_difference(w, m, length_m, medium, length_m);
        };
    }
    throw ValidationError("parameter", "unknown parameter");
  };

  // phase excursion per unit parameter over the guard band
  auto excursion = [&](double h) {
    switch (parameter) {
      case Parameter::phase_delay: return phase_excursion(pulse, TimePerturbation{h, 0, 0});
      case Parameter::group_delay: return phase_excursion(pulse, TimePerturbation{0, h, 0});
      case Parameter::gvd_delay: return phase_excursion(pulse, TimePerturbation{0, 0, h});
      case Parameter::length: return phase_excursion(pulse, length_m, {h, 0, 0});
      case Parameter::density: return phase_excursion(pulse, length_m, {0, h, 0});
      case Parameter::water_vapor: return phase_excursion(pulse, length_m, {0, 0, h});
    }
    return 0.0;
  };

  double h = 0.0;
  if (opt.step) {
    h = *opt.step;
    const double e = excursion(h);
    if (!(e < kLinearityGuardRad)) {
      throw DomainError("finite-difference step too large: phase excursion " +
                        std::to_string(e) + " rad");
    }
    if (!(e > kOracleNoiseFloorPhase)) {
      throw DomainError("finite-difference step below the noise floor: phase excursion " +
                        std::to_string(e) + " rad");
    }
  } else {
    h = kOracleTargetPhase / excursion(1.0);
  }

  const bool through_air = parameter == Parameter::length ||
                           parameter == Parameter::density ||
                           parameter == Parameter::water_vapor;
  SampledSpectrum u = sample(gaussian_mode(pulse), make_grid(pulse, opt.grid_points));
  if (through_air) {
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      if (!(u.grid.omega(i) > 0.0)) u.values[i] = Complex{};
    }
  }
  const auto plus = apply_phase(u, offset(h));
  const auto minus = apply_phase(u, offset(-h));
  SampledSpectrum derivative = u;
  for (std::size_t i = 0; i < derivative.values.size(); ++i) {
    derivative.values[i] = (plus.values[i] - minus.values[i]) / (2.0 * h);
  }
  const double k = std::sqrt(quadrature_inner_product(derivative, derivative).real());
  const SpectralMode mode = project(derivative, opt.max_order).normalized();
  return DetectionMode{parameter, mode, k, {}};
}

// ---------------------------------------------------------------------------
// Air ranging

struct PurifiedRangingSensitivity {
  double overlap_lx;   // <w_L, w_X>
  double overlap_lpw;  // <w_L, w_Pw>
  double overlap_xpw;  // <w_X, w_Pw>
  double k_length;
  double k_full_closed_form;    // K_L^p against {X, Pw}, closed form
  double k_full_gram_schmidt;   // same, from the orthonormalized mode
  double k_density_only;        // K_L^p against {X}
  double delta_l_unpurified;    // m
  double delta_l_full;          // m
  double delta_l_density_only;  // m
  SpectralMode purified_mode;   // w_L^p against {X, Pw}
};

namespace detail {

using Quad = boost::multiprecision::cpp_bin_float_quad;

inline Quad quad_dot(const SpectralMode& a, const SpectralMode& b) {
  const auto n = std::min(a.coefficients().size(), b.coefficients().size());
  Quad acc = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    acc += Quad(a.coefficients()[k].real()) * Quad(b.coefficients()[k].real()) +
           Quad(a.coefficients()[k].imag()) * Quad(b.coefficients()[k].imag());
  }
  return acc;
}

}  // namespace detail

/// K_L^p = K_L sqrt(1 - (b^2 + a^2 - 2abx)/(1 - x^2)) with a = <w_L,w_X>,
/// b = <w_L,w_Pw>, x = <w_X,w_Pw>. The bracket is a ratio of Gram
/// determinants of size ~1e-14 formed from O(1) terms, so it is evaluated in
/// 113-bit arithmetic from the double coefficient vectors.
inline double purified_length_constant(const RangingModes& m) {
  using detail::Quad;
  const Quad a = detail::quad_dot(m.length.mode, m.density.mode);
  const Quad b = detail::quad_dot(m.length.mode, m.water_vapor.mode);
  const Quad x = detail::quad_dot(m.density.mode, m.water_vapor.mode);
  const Quad ll = detail::quad_dot(m.length.mode, m.length.mode);
  const Quad xx = detail::quad_dot(m.density.mode, m.density.mode);
  const Quad pp = detail::quad_dot(m.water_vapor.mode, m.water_vapor.mode);
  // Gram determinants of the (nearly) unit vectors; reduces to 1 - x^2 and
  // 1 + 2abx - a^2 - b^2 - x^2 for exactly unit inputs.
  const Quad det2 = xx * pp - x * x;
  const Quad det3 = ll * xx * pp + 2 * a * b * x - a * a * pp - b * b * xx - x * x * ll;
  if (det2 <= Quad(kDependenceThreshold)) {
    throw DomainError("parameter not separable: w_X and w_Pw are degenerate");
  }
  const Quad ratio = det3 / det2;
  if (ratio <= 0) throw DomainError("parameter not separable: w_L in span{w_X, w_Pw}");
  return m.length.k_const * std::sqrt(static_cast<double>(ratio / ll));
}

inline PurifiedRangingSensitivity purified_ranging_sensitivity(const RangingModes& m,
                                                               double photon_number) {
  const double a = overlap(m.length.mode, m.density.mode);
  const double b = overlap(m.length.mode, m.water_vapor.mode);
  const double x = overlap(m.density.mode, m.water_vapor.mode);
  if (1.0 - x * x <= kDependenceThreshold) {
    throw DomainError("parameter not separable: w_X and w_Pw are degenerate");
  }

  // {w_X, w_Pw^i, w_L} -> third vector is the purified length mode
  const auto basis = gram_schmidt({m.density.mode, m.water_vapor.mode, m.length.mode});
  const SpectralMode wlp = basis[2];
  const double k_gs = m.length.k_const * overlap(wlp, m.length.mode);
  const double k_cf = purified_length_constant(m);
  const double k_x = purify(m.length, {m.density}).k_const;

  return PurifiedRangingSensitivity{
      a, b, x, m.length.k_const, k_cf, k_gs, k_x,
      min_detectable(m.length.k_const, photon_number),
      min_detectable(k_gs, photon_number),
      min_detectable(k_x, photon_number),
      wlp};
}

inline PurifiedRangingSensitivity purified_ranging_sensitivity(const GaussianPulse& pulse,
                                                               const AirState& state,
                                                               double length_m,
                                                               double photon_number) {
  return purified_ranging_sensitivity(ranging_modes(pulse, state, length_m), photon_number);
}

struct ParameterSensitivity {
  std::string label;
  std::string unit;
  double k_const;
  double p_min;
};

struct SensitivityReport {
  GaussianPulse pulse;
  AirState state;
  double length_m;
  double photon_number;
  DispersionScalars scalars;
  RangingModes modes;
  std::vector<ParameterSensitivity> entries;
  /// Row i: LO w_i; column j: coefficient of p_j. Order L, X, Pw.
  Eigen::Matrix3d contamination;
  double prefactor_density;      // (1/L)(K_X/K_L)<w_L,w_X>, dimensionless
  double prefactor_water_vapor;  // (1/L)(K_Pw/K_L)<w_L,w_Pw>, Pa^-1
  PurifiedRangingSensitivity purified;
  /// max |c_k| difference between the finite-difference w_L and the analytic one
  double length_mode_oracle_discrepancy;
  /// relative change of K_L^p when L is scaled by 1000
  double purified_length_dependence;
};

inline SensitivityReport contamination_report(const GaussianPulse& pulse,
                                              const AirState& state, double length_m,
                                              double photon_number) {
  const auto modes = ranging_modes(pulse, state, length_m);
  const std::array<DetectionMode, 3> ws{modes.length, modes.density, modes.water_vapor};

  Eigen::Matrix3d mat;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      mat(i, j) = i == j ? 1.0 : cross_signal(ws[i], ws[j]);
    }
  }

  auto purified = purified_ranging_sensitivity(modes, photon_number);

  std::vector<ParameterSensitivity> entries;
  for (const auto& w : ws) {
    entries.push_back({w.label(), parameter_unit(w.parameter), w.k_const,
                       min_detectable(w.k_const, photon_number)});
  }
  entries.push_back({"w_L^p[X;Pw]", "m", purified.k_full_gram_schmidt, purified.delta_l_full});
  entries.push_back({"w_L^p[X]", "m", purified.k_density_only, purified.delta_l_density_only});

  const auto oracle = numeric_detection_mode(Parameter::length, pulse, state, length_m);
  double discrepancy = 0.0;
  for (std::size_t k = 0; k <= oracle.mode.order(); ++k) {
    discrepancy = std::max(
        discrepancy, std::abs(oracle.mode.coefficient(k) - modes.length.mode.coefficient(k)));
  }

  const double k_far =
      purified_ranging_sensitivity(pulse, state, 1000.0 * length_m, photon_number)
          .k_full_gram_schmidt;
  const double length_dependence = std::abs(k_far / purified.k_full_gram_schmidt - 1.0);

  return SensitivityReport{pulse,
                           state,
                           length_m,
                           photon_number,
                           modes.scalars,
                           modes,
                           std::move(entries),
                           mat,
                           mat(0, 1) / length_m,
                           mat(0, 2) / length_m,
                           std::move(purified),
                           discrepancy,
                           length_dependence};
}

namespace detail {
inline void kv(std::ostream& os, const char* key, double value) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s = %.9e\n", key, value);
  os << buf;
}
}  // namespace detail

/// Key/value text with a matrix block.
inline void write_report(std::ostream& os, const SensitivityReport& r) {
  using detail::kv;
  os << "# comb_ranger sensitivity report\n"
        "# parameter units: p_L in m, p_X dimensionless offset of the density factor X,"
        " p_Pw in Pa\n";
  kv(os, "photon_number", r.photon_number);
  kv(os, "wavelength_m", wavelength_of_angular_frequency(r.pulse.omega0));
  kv(os, "omega0_rad_per_s", r.pulse.omega0);
  kv(os, "delta_omega_rad_per_s", r.pulse.delta_omega);
  kv(os, "intensity_fwhm_s", intensity_fwhm(r.pulse));
  kv(os, "length_m", r.length_m);
  kv(os, "temperature_c", r.state.temperature_c);
  kv(os, "pressure_pa", r.state.pressure_pa);
  kv(os, "co2_percent", r.state.co2_percent);
  kv(os, "water_vapor_pa", r.state.water_vapor_pa);
  kv(os, "delta1", r.scalars.delta1);
  kv(os, "delta2", r.scalars.delta2);
  kv(os, "eta1", r.scalars.eta1);
  kv(os, "eta2", r.scalars.eta2);
  os << "\n[modes]\n";
  for (const auto& e : r.entries) {
    const std::string k = e.label + ".k";
    const std::string p = e.label + ".p_min_" + e.unit;
    kv(os, k.c_str(), e.k_const);
    kv(os, p.c_str(), e.p_min);
  }
  os << "\n[ranging]\n";
  kv(os, "displacement_sensitivity_m", r.purified.delta_l_unpurified);
  kv(os, "purified_sensitivity_m", r.purified.delta_l_full);
  kv(os, "density_only_purified_sensitivity_m", r.purified.delta_l_density_only);
  kv(os, "prefactor_density", r.prefactor_density);
  kv(os, "prefactor_water_vapor_per_pa", r.prefactor_water_vapor);
  kv(os, "k_purified_closed_form", r.purified.k_full_closed_form);
  kv(os, "k_purified_gram_schmidt", r.purified.k_full_gram_schmidt);
  kv(os, "overlap_L_X", r.purified.overlap_lx);
  kv(os, "overlap_L_Pw", r.purified.overlap_lpw);
  kv(os, "overlap_X_Pw", r.purified.overlap_xpw);
  kv(os, "length_mode_oracle_discrepancy", r.length_mode_oracle_discrepancy);
  kv(os, "purified_length_dependence", r.purified_length_dependence);
  os << "\n[contamination]\n"
        "# row: local oscillator, column: coefficient of p_L, p_X, p_Pw\n";
  const char* names[3] = {"w_L", "w_X", "w_Pw"};
  for (int i = 0; i < 3; ++i) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s = %.9e %.9e %.9e\n", names[i], r.contamination(i, 0),
                  r.contamination(i, 1), r.contamination(i, 2));
    os << buf;
  }
}

inline void write_mode_summary(std::ostream& os, std::span<const ModeSummaryRow> rows) {
  os << "\n[time_modes]\n# mode: c0 c1 c2 | K | p_min_s\n";
  for (const auto& row : rows) {
    char buf[220];
    const auto& m = row.mode.mode;
    std::snprintf(buf, sizeof buf, "%s = %.12f %.12f %.12f | %.9e | %.9e\n",
                  row.mode.label().c_str(), m.coefficient(0).real(), m.coefficient(1).real(),
                  m.coefficient(2).real(), row.mode.k_const, row.p_min);
    os << buf;
  }
}

}  // namespace comb_ranger
