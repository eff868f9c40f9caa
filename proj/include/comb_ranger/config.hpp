#pragma once

// JSON run configuration. Dimensioned values are strings with a unit
// suffix ("800 nm", "20 degC", "101325 Pa", "0.04 %"); bare numbers are
// only accepted for dimensionless fields. Unknown keys are rejected.
//
//   {
//     "pulse": {"wavelength": "800 nm", "bandwidth_fraction": 0.16667},
//     "air": {"temperature": "20 degC", "pressure": "101325 Pa",
//             "co2": "0.04 %", "water_vapor_pressure": "0 Pa"},
//     "length": "1 m",
//     "photon_number": 8e16,
//     "simulation": {"lo": "purified", "samples": 100000, "seed": 1,
//                    "threads": 0,
//                    "offset": {"length": "0 m", "density": 0,
//                               "water_vapor_pressure": "0 Pa"},
//                    "fluctuation": {"length": "0 m", "density": 1e-6,
//                                    "water_vapor_pressure": "10 Pa"}},
//     "multicolor": {"scheme": "2wi", "wavelengths": ["1064 nm", "532 nm"],
//                    "photons": [4e16, 4e16]}
//   }

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "comb_ranger/air_model.hpp"
#include "comb_ranger/errors.hpp"
#include "comb_ranger/mode_algebra.hpp"
#include "comb_ranger/simulator.hpp"

namespace comb_ranger {

enum class Dimension { length, temperature, pressure, fraction_percent };

namespace detail {

struct UnitFactor {
  std::string_view name;
  double scale;
  double offset;
};

inline const std::vector<UnitFactor>& units_of(Dimension d) {
  static const std::vector<UnitFactor> length{{"m", 1, 0},      {"km", 1e3, 0},
                                              {"mm", 1e-3, 0},  {"um", 1e-6, 0},
                                              {"µm", 1e-6, 0},  {"nm", 1e-9, 0},
                                              {"pm", 1e-12, 0}, {"fm", 1e-15, 0}};
  static const std::vector<UnitFactor> temperature{{"degC", 1, 0}, {"C", 1, 0}, {"K", 1, -273.15}};
  static const std::vector<UnitFactor> pressure{
      {"Pa", 1, 0}, {"hPa", 100, 0}, {"kPa", 1e3, 0}, {"mbar", 100, 0}, {"bar", 1e5, 0}};
  static const std::vector<UnitFactor> percent{{"%", 1, 0}, {"ppm", 1e-4, 0}};
  switch (d) {
    case Dimension::length: return length;
    case Dimension::temperature: return temperature;
    case Dimension::pressure: return pressure;
    case Dimension::fraction_percent: return percent;
  }
  return length;
}

inline double parse_number(std::string_view text, const std::string& field) {
  const std::string s(text);
  if (s.empty()) throw ValidationError(field, "missing number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ValidationError(field, "not a number: '" + s + "'");
  }
  return v;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// "<number> <unit>" in SI (meters, degC, Pa, percent). When default_unit is
/// given a bare number is read in that unit (command-line flags).
inline double parse_quantity(std::string_view text, Dimension d, const std::string& field,
                             std::optional<std::string_view> default_unit = std::nullopt) {
  text = detail::trim(text);
  std::size_t split = text.size();
  while (split > 0) {
    const char c = text[split - 1];
    if ((c >= '0' && c <= '9') || c == '.') break;
    --split;
  }
  const std::string_view number = detail::trim(text.substr(0, split));
  std::string_view unit = detail::trim(text.substr(split));
  if (unit.empty()) {
    if (!default_unit) throw ValidationError(field, "unit suffix required");
    unit = *default_unit;
  }
  for (const auto& u : detail::units_of(d)) {
    if (u.name == unit) return detail::parse_number(number, field) * u.scale + u.offset;
  }
  throw ValidationError(field, "unknown unit '" + std::string(unit) + "'");
}

inline LoChoice parse_lo(const std::string& s) {
  if (s == "raw") return LoChoice::raw;
  if (s == "purified") return LoChoice::purified;
  if (s == "density_only" || s == "x_only") return LoChoice::density_only;
  throw ValidationError("lo", "expected raw, purified or density_only, got '" + s + "'");
}

inline std::uint64_t parse_seed(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ValidationError("seed", "must be a non-negative integer, got '" + s + "'");
  }
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
  if (errno == ERANGE) throw ValidationError("seed", "out of range");
  return v;
}

struct MulticolorConfig {
  std::string scheme = "2wi";
  std::vector<double> wavelengths_m;  // empty: scheme default
  std::vector<double> photons;        // empty: scheme default
};

struct RunConfig {
  double wavelength_m = 800e-9;
  double bandwidth_fraction = 1.0 / 6.0;
  AirState state = standard_air();
  double length_m = 1.0;
  double photon_number = 8e16;
  LoChoice lo = LoChoice::purified;
  RangingPerturbation offset{};
  RangingPerturbation fluctuation{0.0, 1e-6, 10.0};
  std::size_t samples = 100000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  MulticolorConfig multicolor{};

  GaussianPulse pulse() const { return pulse_at_wavelength(wavelength_m, bandwidth_fraction); }

  SimConfig simulation(std::uint64_t seed_value) const {
    return SimConfig{pulse(),  state,       length_m, photon_number, lo,
                     offset,   fluctuation, samples,  seed_value,    threads};
  }
};

namespace detail {

using Json = nlohmann::json;

inline void require_keys(const Json& j, const std::string& where,
                         std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ValidationError(where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) {
      throw ValidationError(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

inline std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

inline double quantity(const Json& v, Dimension d, const std::string& field) {
  if (!v.is_string()) {
    throw ValidationError(field, "dimensioned value needs a unit suffix, e.g. \"1 m\"");
  }
  return parse_quantity(v.get<std::string>(), d, field);
}

inline double number(const Json& v, const std::string& field) {
  if (!v.is_number()) throw ValidationError(field, "expected a number");
  return v.get<double>();
}

inline std::uint64_t count(const Json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) throw ValidationError(field, "must be >= 0");
  throw ValidationError(field, "expected a non-negative integer");
}

inline void read_perturbation(const Json& j, const std::string& where, RangingPerturbation& p) {
  require_keys(j, where, {"length", "density", "water_vapor_pressure"});
  if (j.contains("length")) p.length_m = quantity(j["length"], Dimension::length, join(where, "length"));
  if (j.contains("density")) p.density = number(j["density"], join(where, "density"));
  if (j.contains("water_vapor_pressure")) {
    p.water_vapor_pa = quantity(j["water_vapor_pressure"], Dimension::pressure,
                                join(where, "water_vapor_pressure"));
  }
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::Json;
  RunConfig c;
  detail::require_keys(j, "", {"pulse", "air", "length", "photon_number", "simulation", "multicolor"});

  if (j.contains("pulse")) {
    const Json& p = j["pulse"];
    detail::require_keys(p, "pulse", {"wavelength", "bandwidth_fraction"});
    if (p.contains("wavelength")) {
      c.wavelength_m = detail::quantity(p["wavelength"], Dimension::length, "pulse.wavelength");
    }
    if (p.contains("bandwidth_fraction")) {
      c.bandwidth_fraction = detail::number(p["bandwidth_fraction"], "pulse.bandwidth_fraction");
    }
  }
  if (j.contains("air")) {
    const Json& a = j["air"];
    detail::require_keys(a, "air", {"temperature", "pressure", "co2", "water_vapor_pressure"});
    if (a.contains("temperature")) {
      c.state.temperature_c = detail::quantity(a["temperature"], Dimension::temperature, "air.temperature");
    }
    if (a.contains("pressure")) {
      c.state.pressure_pa = detail::quantity(a["pressure"], Dimension::pressure, "air.pressure");
    }
    if (a.contains("co2")) {
      c.state.co2_percent = detail::quantity(a["co2"], Dimension::fraction_percent, "air.co2");
    }
    if (a.contains("water_vapor_pressure")) {
      c.state.water_vapor_pa = detail::quantity(a["water_vapor_pressure"], Dimension::pressure,
                                                "air.water_vapor_pressure");
    }
  }
  if (j.contains("length")) c.length_m = detail::quantity(j["length"], Dimension::length, "length");
  if (j.contains("photon_number")) c.photon_number = detail::number(j["photon_number"], "photon_number");

  if (j.contains("simulation")) {
    const Json& s = j["simulation"];
    detail::require_keys(s, "simulation",
                         {"lo", "samples", "seed", "threads", "offset", "fluctuation"});
    if (s.contains("lo")) {
      if (!s["lo"].is_string()) throw ValidationError("simulation.lo", "expected a string");
      c.lo = parse_lo(s["lo"].get<std::string>());
    }
    if (s.contains("samples")) c.samples = detail::count(s["samples"], "simulation.samples");
    if (s.contains("seed")) c.seed = detail::count(s["seed"], "simulation.seed");
    if (s.contains("threads")) {
      c.threads = static_cast<unsigned>(detail::count(s["threads"], "simulation.threads"));
    }
    if (s.contains("offset")) detail::read_perturbation(s["offset"], "simulation.offset", c.offset);
    if (s.contains("fluctuation")) {
      detail::read_perturbation(s["fluctuation"], "simulation.fluctuation", c.fluctuation);
    }
  }

  if (j.contains("multicolor")) {
    const Json& m = j["multicolor"];
    detail::require_keys(m, "multicolor", {"scheme", "wavelengths", "photons"});
    if (m.contains("scheme")) {
      if (!m["scheme"].is_string()) throw ValidationError("multicolor.scheme", "expected a string");
      c.multicolor.scheme = m["scheme"].get<std::string>();
    }
    if (m.contains("wavelengths")) {
      if (!m["wavelengths"].is_array()) {
        throw ValidationError("multicolor.wavelengths", "expected an array");
      }
      for (const auto& v : m["wavelengths"]) {
        c.multicolor.wavelengths_m.push_back(
            detail::quantity(v, Dimension::length, "multicolor.wavelengths"));
      }
    }
    if (m.contains("photons")) {
      if (!m["photons"].is_array()) throw ValidationError("multicolor.photons", "expected an array");
      for (const auto& v : m["photons"]) {
        c.multicolor.photons.push_back(detail::number(v, "multicolor.photons"));
      }
    }
  }
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config", e.what());
  }
  return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

}  // namespace comb_ranger
