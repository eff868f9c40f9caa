#pragma once

// Two- and three-wavelength interferometry baselines.
//
// Each color measures a phase length L_phi_i = n_phi(lambda_i) L. A weighted
// sum with weights summing to one reconstructs L when the weights cancel the
// refractivity: 2WI cancels the density term (dry air), 3WI cancels the
// density and water-vapor terms.

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "comb_ranger/air_model.hpp"
#include "comb_ranger/constants.hpp"
#include "comb_ranger/errors.hpp"

namespace comb_ranger {

struct WavelengthSet {
  std::vector<double> wavelengths_m;
  std::vector<double> photons;  // per wavelength
};

inline void validate(const WavelengthSet& ws) {
  const auto n = ws.wavelengths_m.size();
  if (n < 2 || n > 3) {
    throw ValidationError("wavelengths", "expected 2 or 3 wavelengths");
  }
  if (ws.photons.size() != n) {
    throw ValidationError("photons", "one photon number per wavelength required");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double l = ws.wavelengths_m[i];
    if (!std::isfinite(l) || l <= 0.0) {
      throw ValidationError("wavelengths", "must be finite and positive");
    }
    try {
      (void)Wavenumber::from_wavelength(l);
    } catch (const DomainError& e) {
      throw ValidationError("wavelengths", e.what());
    }
    if (!std::isfinite(ws.photons[i]) || ws.photons[i] < 1.0) {
      throw ValidationError("photons", "photon numbers must be >= 1");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (ws.wavelengths_m[j] == l) {
        throw ValidationError("wavelengths", "wavelengths must be distinct");
      }
    }
  }
}

/// Same photon number on every wavelength.
inline WavelengthSet equal_split(std::vector<double> wavelengths_m, double photons_each) {
  WavelengthSet ws{std::move(wavelengths_m), {}};
  ws.photons.assign(ws.wavelengths_m.size(), photons_each);
  return ws;
}

struct MulticolorCombination {
  std::string scheme;             // "2wi" or "3wi"
  std::vector<double> weights;    // on L_phi_i; sum to one
  std::optional<double> alpha;    // 2WI
  std::optional<double> beta;     // 3WI
  std::optional<double> gamma;    // 3WI
  double residual_density;        // d(combination)/dX divided by L
  double residual_water_vapor;    // d(combination)/dP_w divided by L, Pa^-1
};

inline std::vector<double> phase_lengths(const WavelengthSet& ws, const AirState& state,
                                         double length_m) {
  validate(ws);
  const Medium m = medium_of(state);
  std::vector<double> out;
  for (double l : ws.wavelengths_m) {
    out.push_back(phase_index(Wavenumber::from_wavelength(l), m) * length_m);
  }
  return out;
}

/// alpha = K(l1) / (K(l2) - K(l1)); independent of T, P and CO2.
inline double alpha_2wi(double l1_m, double l2_m) {
  const double k1 = k_dispersion(Wavenumber::from_wavelength(l1_m));
  const double k2 = k_dispersion(Wavenumber::from_wavelength(l2_m));
  if (k2 == k1) {
    throw DomainError("degenerate wavelength pair: K(l1) == K(l2)");
  }
  return k1 / (k2 - k1);
}

inline MulticolorCombination combine_2wi(double l1_m, double l2_m) {
  const double a = alpha_2wi(l1_m, l2_m);
  const Wavenumber s1 = Wavenumber::from_wavelength(l1_m);
  const Wavenumber s2 = Wavenumber::from_wavelength(l2_m);
  const double dk = k_dispersion(s1) + a * (k_dispersion(s1) - k_dispersion(s2));
  const double dg = water_term(s1) + a * (water_term(s1) - water_term(s2));
  return MulticolorCombination{"2wi", {1.0 + a, -a}, a, std::nullopt, std::nullopt, dk, -dg};
}

/// beta, gamma from the first-order cancellation
///   beta (K2 - K1) + gamma (K3 - K1) = -K1
///   beta (g2 - g1) + gamma (g3 - g1) = -g1
inline MulticolorCombination synth_3wi(double l1_m, double l2_m, double l3_m) {
  if (l1_m == l2_m || l1_m == l3_m || l2_m == l3_m) {
    throw ValidationError("wavelengths", "wavelengths must be distinct");
  }
  const Wavenumber s1 = Wavenumber::from_wavelength(l1_m);
  const Wavenumber s2 = Wavenumber::from_wavelength(l2_m);
  const Wavenumber s3 = Wavenumber::from_wavelength(l3_m);
  const double k1 = k_dispersion(s1), k2 = k_dispersion(s2), k3 = k_dispersion(s3);
  const double g1 = water_term(s1), g2 = water_term(s2), g3 = water_term(s3);

  // rows scaled to O(1) so the singularity test is relative
  Eigen::Matrix2d a;
  a << (k2 - k1) / k1, (k3 - k1) / k1, (g2 - g1) / g1, (g3 - g1) / g1;
  const Eigen::Vector2d rhs(-1.0, -1.0);
  const Eigen::FullPivLU<Eigen::Matrix2d> lu(a);
  const double scale = a.cwiseAbs().maxCoeff();
  if (!(std::abs(a.determinant()) > 1e-12 * scale * scale)) {
    throw DomainError("colinear dispersion: K and g differences are proportional");
  }
  const Eigen::Vector2d x = lu.solve(rhs);
  const double beta = x[0];
  const double gamma = x[1];
  const double dk = k1 + beta * (k2 - k1) + gamma * (k3 - k1);
  const double dg = g1 + beta * (g2 - g1) + gamma * (g3 - g1);
  return MulticolorCombination{
      "3wi", {1.0 - beta - gamma, beta, gamma}, std::nullopt, beta, gamma, dk, -dg};
}

/// Combination of measured phase lengths.
inline double combine(const MulticolorCombination& c, const std::vector<double>& lengths) {
  if (lengths.size() != c.weights.size()) {
    throw ValidationError("wavelengths", "combination and data sizes differ");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) acc += c.weights[i] * lengths[i];
  return acc;
}

/// combination - L, formed from refractivities so it does not cancel
/// against L itself.
inline double combination_error(const MulticolorCombination& c, const WavelengthSet& ws,
                                 const Medium& medium, double length_m) {
  validate(ws);
  double acc = 0.0;
  for (std::size_t i = 0; i < ws.wavelengths_m.size(); ++i) {
    acc += c.weights[i] *
           phase_refractivity(Wavenumber::from_wavelength(ws.wavelengths_m[i]), medium);
  }
  return acc * length_m;
}

/// Shot-noise limit of one color, c / (2 sqrt(N) omega).
inline double single_color_shot_noise(double wavelength_m, double photons) {
  return kSpeedOfLight /
         (2.0 * std::sqrt(photons) * angular_frequency_of_wavelength(wavelength_m));
}

/// Independent channels added in quadrature.
inline double shot_noise(const WavelengthSet& ws, const MulticolorCombination& c) {
  validate(ws);
  if (c.weights.size() != ws.wavelengths_m.size()) {
    throw ValidationError("wavelengths", "combination and wavelength set sizes differ");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < c.weights.size(); ++i) {
    const double d = c.weights[i] * single_color_shot_noise(ws.wavelengths_m[i], ws.photons[i]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline double shot_noise_2wi(const WavelengthSet& ws) {
  validate(ws);
  if (ws.wavelengths_m.size() != 2) throw ValidationError("wavelengths", "2WI needs two");
  return shot_noise(ws, combine_2wi(ws.wavelengths_m[0], ws.wavelengths_m[1]));
}

inline double shot_noise_3wi(const WavelengthSet& ws, const MulticolorCombination& c) {
  if (ws.wavelengths_m.size() != 3) throw ValidationError("wavelengths", "3WI needs three");
  return shot_noise(ws, c);
}

/// Bias of the dry-air 2WI reconstruction in moist air.
inline double humidity_systematic_2wi(const WavelengthSet& ws, const AirState& state,
                                      double length_m) {
  validate(ws);
  if (ws.wavelengths_m.size() != 2) throw ValidationError("wavelengths", "2WI needs two");
  return combination_error(combine_2wi(ws.wavelengths_m[0], ws.wavelengths_m[1]), ws,
                           medium_of(state), length_m);
}

struct ComparisonRow {
  MulticolorCombination combination;
  WavelengthSet wavelengths;
  double shot_noise_m;
  double humidity_bias_m;
};

inline ComparisonRow compare(const WavelengthSet& ws, const AirState& state, double length_m) {
  validate(ws);
  const auto& l = ws.wavelengths_m;
  MulticolorCombination c = l.size() == 2 ? combine_2wi(l[0], l[1]) : synth_3wi(l[0], l[1], l[2]);
  return ComparisonRow{c, ws, shot_noise(ws, c),
                       combination_error(c, ws, medium_of(state), length_m)};
}

inline void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows) {
  os << "scheme,wavelengths_nm,photons,alpha,beta,gamma,shot_noise_m,humidity_bias_m\n";
  auto num = [](double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.9e", v);
    return std::string(b);
  };
  auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  for (const auto& r : rows) {
    std::string wl, ph;
    for (std::size_t i = 0; i < r.wavelengths.wavelengths_m.size(); ++i) {
      if (i) {
        wl += ';';
        ph += ';';
      }
      char b[40];
      std::snprintf(b, sizeof b, "%.6g", r.wavelengths.wavelengths_m[i] * 1e9);
      wl += b;
      std::snprintf(b, sizeof b, "%.6g", r.wavelengths.photons[i]);
      ph += b;
    }
    os << r.combination.scheme << ',' << wl << ',' << ph << ',' << opt(r.combination.alpha)
       << ',' << opt(r.combination.beta) << ',' << opt(r.combination.gamma) << ','
       << num(r.shot_noise_m) << ',' << num(r.humidity_bias_m) << '\n';
  }
}

}  // namespace comb_ranger
