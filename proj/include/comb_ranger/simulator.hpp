#pragma once

// Monte Carlo model of a single shaped-LO homodyne distance measurement.
//
// Each sample draws the environmental offsets, forms the first-order field
// u + sum p_i K_i w_i, projects it on the chosen LO and adds Gaussian shot
// noise with sigma_S = 1/(2 sqrt(N) K_lo). Every sample owns an RNG stream
// keyed by (seed, index), so results do not depend on the thread count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "comb_ranger/air_model.hpp"
#include "comb_ranger/detection.hpp"
#include "comb_ranger/detection_modes.hpp"
#include "comb_ranger/dispersion.hpp"
#include "comb_ranger/errors.hpp"
#include "comb_ranger/mode_algebra.hpp"

namespace comb_ranger {

/// SplitMix64 stream; satisfies UniformRandomBitGenerator.
class SampleStream {
public:
  using result_type = std::uint64_t;

  SampleStream(std::uint64_t seed, std::uint64_t index)
      : state_(mix(seed ^ mix(index + 0x9E3779B97F4A7C15ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

private:
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

enum class LoChoice { raw, purified, density_only };

inline std::string to_string(LoChoice lo) {
  switch (lo) {
    case LoChoice::raw: return "raw";
    case LoChoice::purified: return "purified";
    case LoChoice::density_only: return "density_only";
  }
  return "?";
}

struct SimConfig {
  GaussianPulse pulse;
  AirState state = standard_air();
  double length_m = 1.0;
  double photon_number = 8e16;
  LoChoice lo = LoChoice::purified;
  RangingPerturbation offset{};  // fixed true perturbations
  RangingPerturbation spread{};  // per-sample standard deviations (0 = fixed)
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

inline constexpr std::size_t kMinRegressionSamples = 30;

inline void validate(const SimConfig& c) {
  validate(c.pulse);
  validate(c.state);
  validate_length(c.length_m);
  if (!std::isfinite(c.photon_number) || c.photon_number < 1.0) {
    throw ValidationError("photons", "photon number must be >= 1");
  }
  if (c.samples < 1) throw ValidationError("samples", "must be >= 1");
  for (double s : {c.spread.length_m, c.spread.density, c.spread.water_vapor_pa}) {
    if (!std::isfinite(s) || s < 0.0) {
      throw ValidationError("fluctuation", "standard deviations must be finite and >= 0");
    }
  }
  // fixed offset plus one standard deviation of each fluctuation
  const double excursion =
      phase_excursion(c.pulse, c.length_m, c.offset) +
      phase_excursion(c.pulse, c.length_m, {c.spread.length_m, 0, 0}) +
      phase_excursion(c.pulse, c.length_m, {0, c.spread.density, 0}) +
      phase_excursion(c.pulse, c.length_m, {0, 0, c.spread.water_vapor_pa});
  require_linear(excursion);
}

inline DetectionMode local_oscillator(const RangingModes& m, LoChoice lo) {
  switch (lo) {
    case LoChoice::raw: return m.length;
    case LoChoice::purified: return purify(m.length, {m.density, m.water_vapor});
    case LoChoice::density_only: return purify(m.length, {m.density});
  }
  throw ValidationError("lo", "unknown local oscillator");
}

struct Sample {
  double length_m;
  double density;
  double water_vapor_pa;
  double signal_m;
};

/// Draw all samples. Deterministic in (config, seed) for any thread count.
inline std::vector<Sample> simulate_samples(const SimConfig& c) {
  validate(c);
  const RangingModes modes = ranging_modes(c.pulse, c.state, c.length_m);
  const DetectionMode lo = local_oscillator(modes, c.lo);
  const double noise = min_detectable(lo.k_const, c.photon_number);
  const SpectralMode u = gaussian_mode(c.pulse);
  const std::array ws{modes.length, modes.density, modes.water_vapor};

  std::vector<Sample> out(c.samples);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SampleStream rng(c.seed, i);
      std::normal_distribution<double> normal;
      const std::array<double, 3> p{c.offset.length_m + c.spread.length_m * normal(rng),
                                    c.offset.density + c.spread.density * normal(rng),
                                    c.offset.water_vapor_pa + c.spread.water_vapor_pa * normal(rng)};
      const SpectralMode field = linearized_field(u, ws, p);
      out[i] = Sample{p[0], p[1], p[2], homodyne_signal(field, lo) + noise * normal(rng)};
    }
  };

  unsigned threads = c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, (c.samples + 1023) / 1024));
  if (threads <= 1) {
    work(0, c.samples);
    return out;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (c.samples + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t b = t * chunk;
    const std::size_t e = std::min(c.samples, b + chunk);
    if (b < e) pool.emplace_back(work, b, e);
  }
  return out;
}

struct Slope {
  double expected;  // analytic cross-signal coefficient
  double estimate;
  double standard_error;
  double t_statistic() const { return estimate / standard_error; }
  /// |estimate - expected| in standard errors
  double deviation() const { return std::abs(estimate - expected) / standard_error; }
};

struct SimResult {
  std::string lo_label;
  double k_lo;
  double predicted_sigma_m;
  std::size_t samples;
  double mean_m;
  double std_m;
  double mean_standard_error_m;
  double std_standard_error_m;
  double bias_m;  // mean - p_L offset
  std::optional<Slope> length_slope;
  std::optional<Slope> density_slope;
  std::optional<Slope> water_vapor_slope;
};

/// Statistics and least-squares leakage slopes of the signal against the
/// injected offsets that actually fluctuate.
inline SimResult analyze(const SimConfig& c, const std::vector<Sample>& samples) {
  const RangingModes modes = ranging_modes(c.pulse, c.state, c.length_m);
  const DetectionMode lo = local_oscillator(modes, c.lo);
  const std::size_t n = samples.size();

  double mean = 0.0;
  for (const auto& s : samples) mean += s.signal_m;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const auto& s : samples) ss += (s.signal_m - mean) * (s.signal_m - mean);
  const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

  SimResult r{lo.label(),
              lo.k_const,
              min_detectable(lo.k_const, c.photon_number),
              n,
              mean,
              sd,
              sd / std::sqrt(static_cast<double>(n)),
              n > 1 ? sd / std::sqrt(2.0 * static_cast<double>(n - 1)) : 0.0,
              mean - c.offset.length_m,
              std::nullopt,
              std::nullopt,
              std::nullopt};

  const std::array<double, 3> spread{c.spread.length_m, c.spread.density,
                                     c.spread.water_vapor_pa};
  const std::array<DetectionMode, 3> ws{modes.length, modes.density, modes.water_vapor};
  std::vector<int> cols;
  for (int j = 0; j < 3; ++j) {
    if (spread[j] > 0.0) cols.push_back(j);
  }
  if (cols.empty()) return r;
  const auto k = static_cast<Eigen::Index>(cols.size());
  if (n < std::max(kMinRegressionSamples, static_cast<std::size_t>(k) + 3)) {
    throw ValidationError("samples", "too few samples for the leakage regression");
  }

  auto injected = [](const Sample& s, int j) {
    return j == 0 ? s.length_m : (j == 1 ? s.density : s.water_vapor_pa);
  };
  Eigen::VectorXd centre = Eigen::VectorXd::Zero(k);
  for (const auto& s : samples) {
    for (Eigen::Index q = 0; q < k; ++q) centre[q] += injected(s, cols[q]);
  }
  centre /= static_cast<double>(n);

  // columns scaled by their spread for conditioning
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), k);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index q = 0; q < k; ++q) {
      x(row, q) = (injected(samples[i], cols[q]) - centre[q]) / spread[cols[q]];
    }
    y[row] = samples[i].signal_m - mean;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < k) throw DomainError("degenerate leakage regression");
  const Eigen::VectorXd beta = qr.solve(y);
  const double rss = (y - x * beta).squaredNorm();
  const double s2 = rss / static_cast<double>(static_cast<Eigen::Index>(n) - k - 1);
  const Eigen::MatrixXd cov = s2 * (x.transpose() * x).inverse();

  for (Eigen::Index q = 0; q < k; ++q) {
    const int j = cols[q];
    Slope sl{cross_signal(lo, ws[j]), beta[q] / spread[j], std::sqrt(cov(q, q)) / spread[j]};
    if (j == 0) r.length_slope = sl;
    if (j == 1) r.density_slope = sl;
    if (j == 2) r.water_vapor_slope = sl;
  }
  return r;
}

inline SimResult run(const SimConfig& c) { return analyze(c, simulate_samples(c)); }

inline constexpr double kImmunityT = 3.0;

struct ImmunityReport {
  SimResult result;
  /// true when every applicable environmental slope has |t| < 3;
  /// empty when no environmental parameter fluctuates
  std::optional<bool> immune;
};

inline ImmunityReport immunity_verdict(SimResult r) {
  std::optional<bool> immune;
  for (const auto& s : {r.density_slope, r.water_vapor_slope}) {
    if (!s) continue;
    const bool ok = std::abs(s->t_statistic()) < kImmunityT;
    immune = immune.value_or(true) && ok;
  }
  return ImmunityReport{std::move(r), immune};
}

inline ImmunityReport immunity_report(const SimConfig& c) {
  if (c.samples < kMinRegressionSamples) {
    throw ValidationError("samples", "immunity regression needs at least 30 samples");
  }
  return immunity_verdict(run(c));
}

inline void write_samples_csv(std::ostream& os, const std::vector<Sample>& samples) {
  os << "index,p_L_m,p_X,p_Pw_pa,signal_m\n";
  char buf[160];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", i, s.length_m, s.density,
                  s.water_vapor_pa, s.signal_m);
    os << buf;
  }
}

inline void write_sim_report(std::ostream& os, const SimConfig& c, const ImmunityReport& rep) {
  const auto& r = rep.result;
  char buf[200];
  auto kv = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s = %.9e\n", key, v);
    os << buf;
  };
  os << "# comb_ranger simulation report\n";
  os << "lo = " << r.lo_label << "\n";
  os << "seed = " << c.seed << "\n";
  os << "samples = " << r.samples << "\n";
  kv("photon_number", c.photon_number);
  kv("length_m", c.length_m);
  kv("k_lo_per_m", r.k_lo);
  kv("predicted_sigma_m", r.predicted_sigma_m);
  kv("sample_mean_m", r.mean_m);
  kv("sample_std_m", r.std_m);
  kv("mean_standard_error_m", r.mean_standard_error_m);
  kv("std_standard_error_m", r.std_standard_error_m);
  kv("bias_m", r.bias_m);
  auto slope = [&](const char* name, const std::optional<Slope>& s) {
    if (!s) {
      os << name << " = n/a\n";
      return;
    }
    std::snprintf(buf, sizeof buf, "%s = %.9e +- %.3e (t = %.3f, expected %.9e)\n", name,
                  s->estimate, s->standard_error, s->t_statistic(), s->expected);
    os << buf;
  };
  slope("slope_p_L", r.length_slope);
  slope("slope_p_X", r.density_slope);
  slope("slope_p_Pw_per_pa", r.water_vapor_slope);
  os << "immune: " << (rep.immune ? (*rep.immune ? "true" : "false") : "n/a") << "\n";
}

}  // namespace comb_ranger
