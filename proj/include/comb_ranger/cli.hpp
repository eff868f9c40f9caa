#pragma once

// comb_ranger command-line front end. run_cli is the whole program; main()
// only forwards argv and the standard streams.
//
// exit codes: 0 ok, 2 validation / usage error, 3 numerical or domain error

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "comb_ranger/air_model.hpp"
#include "comb_ranger/config.hpp"
#include "comb_ranger/detection.hpp"
#include "comb_ranger/detection_modes.hpp"
#include "comb_ranger/errors.hpp"
#include "comb_ranger/mode_algebra.hpp"
#include "comb_ranger/multicolor.hpp"
#include "comb_ranger/simulator.hpp"

namespace comb_ranger {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitDomain = 3;
inline constexpr const char* kSeedEnv = "COMB_RANGER_SEED";
inline constexpr std::uint64_t kDefaultSeed = 1;

namespace cli_detail {

inline std::string fmt(double v, const char* spec = "%.9e") {
  char b[48];
  std::snprintf(b, sizeof b, spec, v);
  return b;
}

inline void kv(std::ostream& os, const std::string& key, double v) {
  os << key << " = " << fmt(v) << "\n";
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

inline void air_index(std::ostream& out, double wavelength_m, const AirState& state) {
  validate(state);
  if (!(wavelength_m > 0.0)) throw ValidationError("wavelength", "must be positive");
  Wavenumber sigma(0.0);
  try {
    sigma = Wavenumber::from_wavelength(wavelength_m);
  } catch (const DomainError& e) {
    throw ValidationError("wavelength", e.what());
  }
  const Medium m = medium_of(state);
  const auto s = dispersion_scalars(sigma.angular_frequency());
  out << "# air index, Boensch-Potulski dispersion formula\n";
  kv(out, "wavelength_m", wavelength_m);
  kv(out, "wavenumber_per_um", sigma.per_micrometer());
  kv(out, "temperature_c", state.temperature_c);
  kv(out, "pressure_pa", state.pressure_pa);
  kv(out, "co2_percent", state.co2_percent);
  kv(out, "water_vapor_pa", state.water_vapor_pa);
  out << "n_phase = " << fmt(phase_index(sigma, m), "%.12f") << "\n";
  out << "n_group = " << fmt(group_index(sigma, m), "%.12f") << "\n";
  kv(out, "n_phase_minus_1", phase_refractivity(sigma, m));
  kv(out, "n_group_minus_1", group_refractivity(sigma, m));
  kv(out, "K", k_dispersion(sigma));
  kv(out, "g_per_pa", water_term(sigma));
  kv(out, "X", m.density_factor);
  kv(out, "delta1", s.delta1);
  kv(out, "delta2", s.delta2);
  kv(out, "eta1", s.eta1);
  kv(out, "eta2", s.eta2);
}

struct NamedMode {
  std::string name;
  SpectralMode mode;
  std::optional<double> k_const;
  std::string unit;
};

inline std::vector<NamedMode> mode_catalogue(const RunConfig& c) {
  const GaussianPulse p = c.pulse();
  const auto t = time_detection_modes(p);
  const auto r = ranging_modes(p, c.state, c.length_m);
  const auto phi_p = purify(t.phase, {t.group, t.gvd});
  const auto gvd_p = purify(t.gvd, {t.phase, t.group});
  const auto lp = purify(r.length, {r.density, r.water_vapor});
  const auto lx = purify(r.length, {r.density});
  std::vector<NamedMode> v{{"u", gaussian_mode(p), std::nullopt, ""},
                           {"v0", hermite_gauss(0, p), std::nullopt, ""},
                           {"v1", hermite_gauss(1, p), std::nullopt, ""},
                           {"v2", hermite_gauss(2, p), std::nullopt, ""}};
  for (const auto* d : {&t.phase, &t.group, &t.gvd, &phi_p, &gvd_p, &r.length, &r.density,
                        &r.water_vapor, &lp, &lx}) {
    v.push_back({d->label(), d->mode, d->k_const, "1/" + parameter_unit(d->parameter)});
  }
  return v;
}

inline void write_mode_table(std::ostream& out, const std::vector<NamedMode>& modes) {
  out << "mode,k_const,k_unit,c0_re,c0_im,c1_re,c1_im,c2_re,c2_im\n";
  for (const auto& m : modes) {
    out << m.name << ',' << (m.k_const ? fmt(*m.k_const, "%.12e") : "") << ',' << m.unit;
    for (std::size_t k = 0; k < 3; ++k) {
      const Complex ck = m.mode.coefficient(k);
      out << ',' << fmt(ck.real(), "%.15e") << ',' << fmt(ck.imag(), "%.15e");
    }
    out << '\n';
  }
}

/// Complex profiles on x = (w - w0)/dw, amplitudes scaled by sqrt(dw) so
/// that sum |a|^2 dx is the squared norm.
inline void write_profiles(std::ostream& out, const std::vector<NamedMode>& modes,
                           const GaussianPulse& p, std::size_t points, double half_width) {
  out << "x,omega_rad_per_s";
  for (const auto& m : modes) out << ',' << m.name << "_re," << m.name << "_im";
  out << '\n';
  const double scale = std::sqrt(p.delta_omega);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = -half_width + 2.0 * half_width * static_cast<double>(i) /
                                       static_cast<double>(points - 1);
    const double w = p.omega0 + x * p.delta_omega;
    out << fmt(x, "%.17g") << ',' << fmt(w, "%.17g");
    for (const auto& m : modes) {
      const Complex a = m.mode(w) * scale;
      out << ',' << fmt(a.real(), "%.17g") << ',' << fmt(a.imag(), "%.17g");
    }
    out << '\n';
  }
}

inline WavelengthSet multicolor_set(const MulticolorConfig& m) {
  if (m.scheme != "2wi" && m.scheme != "3wi") {
    throw ValidationError("scheme", "expected 2wi or 3wi, got '" + m.scheme + "'");
  }
  const std::size_t n = m.scheme == "2wi" ? 2 : 3;
  std::vector<double> wl = m.wavelengths_m;
  if (wl.empty()) {
    wl = n == 2 ? std::vector<double>{1064e-9, 532e-9} : std::vector<double>{1064e-9, 532e-9, 355e-9};
  }
  if (wl.size() != n) {
    throw ValidationError("wavelengths", m.scheme + " needs " + std::to_string(n) + " wavelengths");
  }
  std::vector<double> ph = m.photons;
  if (ph.empty()) ph.assign(n, 8e16 / static_cast<double>(n));
  if (ph.size() == 1) ph.assign(n, ph.front());
  if (ph.size() != n) {
    throw ValidationError("photons", "give one photon number or one per wavelength");
  }
  WavelengthSet ws{wl, ph};
  validate(ws);
  return ws;
}

inline std::uint64_t resolve_seed(const std::optional<std::string>& flag, const RunConfig& c) {
  if (flag) return parse_seed(*flag);
  if (const char* env = std::getenv(kSeedEnv); env && *env) return parse_seed(env);
  return c.seed.value_or(kDefaultSeed);
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"Shot-noise and dispersion model of frequency-comb distance measurement in air",
               "comb_ranger"};
  app.require_subcommand(1);

  // air-index
  auto* air = app.add_subcommand("air-index", "refractive index of air at one wavelength");
  std::string a_wl = "633", a_t = "20", a_p = "101325", a_co2 = "0.04", a_hw = "0";
  air->add_option("--wavelength", a_wl, "vacuum wavelength (nm unless suffixed)")->capture_default_str();
  air->add_option("--temperature", a_t, "temperature (degC unless suffixed)")->capture_default_str();
  air->add_option("--pressure", a_p, "total pressure (Pa unless suffixed)")->capture_default_str();
  air->add_option("--co2", a_co2, "CO2 content (% unless suffixed)")->capture_default_str();
  air->add_option("--humidity-pa", a_hw, "water-vapor partial pressure (Pa unless suffixed)")
      ->capture_default_str();

  // shared pulse/medium overrides for the config-driven commands
  struct Overrides {
    std::string config;
    std::optional<std::string> wavelength, length, photons;
  };
  auto add_common = [](CLI::App* sc, Overrides& o) {
    sc->add_option("--config", o.config, "JSON run configuration");
    sc->add_option("--wavelength", o.wavelength, "carrier wavelength (nm unless suffixed)");
    sc->add_option("--length", o.length, "path length (m unless suffixed)");
    sc->add_option("--photons", o.photons, "photon number per measurement");
  };
  auto resolve = [](const Overrides& o) {
    RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (o.wavelength) {
      c.wavelength_m = parse_quantity(*o.wavelength, Dimension::length, "wavelength", "nm");
    }
    if (o.length) c.length_m = parse_quantity(*o.length, Dimension::length, "length", "m");
    if (o.photons) c.photon_number = detail::parse_number(*o.photons, "photons");
    return c;
  };

  auto* modes = app.add_subcommand("modes", "mode coefficient table and spectral profiles");
  Overrides m_o;
  std::string m_profiles;
  std::size_t m_points = 4097;
  add_common(modes, m_o);
  modes->add_option("--profiles", m_profiles, "write sampled profiles to this CSV file");
  modes->add_option("--points", m_points, "profile samples over x in [-8, 8]")->capture_default_str();

  auto* sens = app.add_subcommand("sensitivity", "shot-noise limits and contamination of ranging");
  Overrides s_o;
  add_common(sens, s_o);

  auto* multi = app.add_subcommand("multicolor", "two- and three-wavelength baselines");
  std::string mc_config;
  std::optional<std::string> mc_scheme, mc_wl, mc_ph, mc_hw, mc_len;
  multi->add_option("--config", mc_config, "JSON run configuration");
  multi->add_option("--scheme", mc_scheme, "2wi or 3wi");
  multi->add_option("--wavelengths", mc_wl, "comma-separated wavelengths (nm unless suffixed)");
  multi->add_option("--photons", mc_ph, "photon number per wavelength, one value or a list");
  multi->add_option("--humidity-pa", mc_hw, "water-vapor pressure for the humidity bias (Pa)");
  multi->add_option("--length", mc_len, "path length for the humidity bias (m)");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo homodyne ranging run");
  Overrides sim_o;
  std::optional<std::string> sim_seed, sim_lo;
  std::optional<long long> sim_samples;
  std::optional<unsigned> sim_threads;
  std::string sim_out;
  add_common(sim, sim_o);
  sim->add_option("--seed", sim_seed, "RNG seed (overrides " + std::string(kSeedEnv) + ")");
  sim->add_option("--samples", sim_samples, "number of samples");
  sim->add_option("--lo", sim_lo, "raw, purified or density_only");
  sim->add_option("--threads", sim_threads, "worker threads (0 = all cores)");
  sim->add_option("--out", sim_out, "write the samples to this CSV file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (air->parsed()) {
      AirState st{parse_quantity(a_t, Dimension::temperature, "temperature", "degC"),
                  parse_quantity(a_p, Dimension::pressure, "pressure", "Pa"),
                  parse_quantity(a_co2, Dimension::fraction_percent, "co2", "%"),
                  parse_quantity(a_hw, Dimension::pressure, "water_vapor_pressure", "Pa")};
      air_index(out, parse_quantity(a_wl, Dimension::length, "wavelength", "nm"), st);
    } else if (modes->parsed()) {
      const RunConfig c = resolve(m_o);
      const auto catalogue = mode_catalogue(c);
      write_mode_table(out, catalogue);
      if (!m_profiles.empty()) {
        if (m_points < 3) throw ValidationError("points", "need at least 3 points");
        std::ofstream f(m_profiles);
        if (!f) throw ValidationError("profiles", "cannot write '" + m_profiles + "'");
        write_profiles(f, catalogue, c.pulse(), m_points, 8.0);
      }
    } else if (sens->parsed()) {
      const RunConfig c = resolve(s_o);
      write_report(out, contamination_report(c.pulse(), c.state, c.length_m, c.photon_number));
    } else if (multi->parsed()) {
      RunConfig c = mc_config.empty() ? RunConfig{} : load_config(mc_config);
      MulticolorConfig m = c.multicolor;
      if (mc_scheme) {
        if (m.scheme != *mc_scheme) {
          m.wavelengths_m.clear();
          m.photons.clear();
        }
        m.scheme = *mc_scheme;
      }
      if (mc_wl) {
        m.wavelengths_m.clear();
        for (const auto& s : split_list(*mc_wl)) {
          m.wavelengths_m.push_back(parse_quantity(s, Dimension::length, "wavelengths", "nm"));
        }
      }
      if (mc_ph) {
        m.photons.clear();
        for (const auto& s : split_list(*mc_ph)) m.photons.push_back(detail::parse_number(s, "photons"));
      }
      if (mc_hw) {
        c.state.water_vapor_pa = parse_quantity(*mc_hw, Dimension::pressure, "water_vapor_pressure", "Pa");
      }
      if (mc_len) c.length_m = parse_quantity(*mc_len, Dimension::length, "length", "m");
      validate(c.state);
      validate_length(c.length_m);
      write_comparison_csv(out, {compare(multicolor_set(m), c.state, c.length_m)});
    } else if (sim->parsed()) {
      RunConfig c = resolve(sim_o);
      if (sim_samples) {
        if (*sim_samples < 1) throw ValidationError("samples", "must be >= 1");
        c.samples = static_cast<std::size_t>(*sim_samples);
      }
      if (sim_lo) c.lo = parse_lo(*sim_lo);
      if (sim_threads) c.threads = *sim_threads;
      const SimConfig sc = c.simulation(resolve_seed(sim_seed, c));
      const auto samples = simulate_samples(sc);
      ImmunityReport rep = immunity_verdict(analyze(sc, samples));
      write_sim_report(out, sc, rep);
      if (!sim_out.empty()) {
        std::ofstream f(sim_out);
        if (!f) throw ValidationError("out", "cannot write '" + sim_out + "'");
        write_samples_csv(f, samples);
      }
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace comb_ranger
