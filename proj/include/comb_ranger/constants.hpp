#pragma once

#include <numbers>

namespace comb_ranger {

/// Speed of light in vacuum, m/s (exact).
inline constexpr double kSpeedOfLight = 299'792'458.0;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Angular frequency (rad/s) of a vacuum wavelength given in meters.
constexpr double angular_frequency_of_wavelength(double wavelength_m) {
  return kTwoPi * kSpeedOfLight / wavelength_m;
}

constexpr double wavelength_of_angular_frequency(double omega) {
  return kTwoPi * kSpeedOfLight / omega;
}

}  // namespace comb_ranger
