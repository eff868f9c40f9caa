// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "comb_ranger/air_model.hpp"
#include "comb_ranger/detection.hpp"
#include "comb_ranger/multicolor.hpp"
#include "comb_ranger/simulator.hpp"

using namespace comb_ranger;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* spec, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, spec, a, b, c, d);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

double coeff_distance(const SpectralMode& a, const SpectralMode& b) {
  double d = 0.0;
  for (std::size_t k = 0; k <= std::max(a.order(), b.order()); ++k) {
    d = std::max(d, std::abs(a.coefficient(k) - b.coefficient(k)));
  }
  return d;
}

const GaussianPulse kPulse = pulse_at_wavelength(800e-9, 1.0 / 6.0);
constexpr double kPhotons = 8e16;

void air_model_sanity() {
  const double r = phase_index(Wavenumber::from_wavelength(633e-9), standard_air()) - 1.0;
  report(1, r >= 2.6e-4 && r <= 2.8e-4, fmt("n-1 (633 nm, standard dry air) = %.6e", r));
}

void alpha_factor() {
  const double a = alpha_2wi(1064e-9, 532e-9);
  report(2, a >= 55 && a <= 75, fmt("alpha(1064, 532) = %.4f", a));
}

void two_color_noise() {
  const double n = shot_noise_2wi(equal_split({1064e-9, 532e-9}, 4e16));
  report(3, n >= 2e-14 && n <= 4e-14, fmt("2WI shot noise = %.4e m", n));
}

void three_color_noise() {
  const auto ws = equal_split({1064e-9, 532e-9, 355e-9}, kPhotons / 3);
  const double n = shot_noise_3wi(ws, synth_3wi(1064e-9, 532e-9, 355e-9));
  report(4, n >= 3e-13 && n <= 3e-12, fmt("3WI shot noise = %.4e m", n));
}

void mode_algebra_exactness() {
  const auto m = time_detection_modes(kPulse);
  const auto phi_p = purify(m.phase, {m.group, m.gvd});
  const auto gvd_p = purify(m.gvd, {m.phase, m.group});
  const double w0 = kPulse.omega0, dw = kPulse.delta_omega;
  const double s3 = 1 / std::sqrt(3.0), s23 = std::sqrt(2.0 / 3.0);
  double worst = 0.0;
  auto check = [&](const SpectralMode& mode, std::vector<double> expected) {
    for (std::size_t k = 0; k <= std::max<std::size_t>(mode.order(), 2); ++k) {
      const double e = k < expected.size() ? expected[k] : 0.0;
      worst = std::max(worst, std::abs(mode.coefficient(k) - Complex(e)));
    }
  };
  check(m.gvd.mode, {s3, 0, s23});
  check(phi_p.mode, {s23, 0, -s3});
  worst = std::max(worst, rel(phi_p.k_const, s23 * w0));
  worst = std::max(worst, rel(gvd_p.k_const, std::sqrt(2.0) * dw * dw / w0));
  worst = std::max(worst, rel(m.gvd.k_const, std::sqrt(3.0) * dw * dw / w0));
  report(5, worst < 1e-12, fmt("max relative deviation = %.2e", worst));
}

void signal_cross_terms() {
  const auto m = time_detection_modes(kPulse);
  const double r2 = kPulse.delta_omega * kPulse.delta_omega / (kPulse.omega0 * kPulse.omega0);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const TimePerturbation p{1e-20 * u(rng), 1e-20 * u(rng), 1e-19 * u(rng)};
    const auto field = linearized_field(kPulse, p);
    worst = std::max(worst, rel(homodyne_signal(field, m.phase), p.phase_delay + r2 * p.gvd_delay));
    worst = std::max(worst,
                     rel(homodyne_signal(field, m.gvd), p.phase_delay / (3 * r2) + p.gvd_delay));
  }
  report(6, worst < 1e-10, fmt("max relative deviation over 100 draws = %.2e", worst));
}

void displacement_sensitivity() {
  const auto m = ranging_modes(kPulse, standard_air(), 1.0);
  const double d = min_detectable(m.length.k_const, kPhotons);
  report(7, d >= 1.5e-16 && d <= 3e-16,
         fmt("c/(2 sqrt(N) K_L) = %.4e m (FWHM %.3f fs)", d, intensity_fwhm(kPulse) * 1e15));
}

void contamination_prefactors() {
  const auto r = contamination_report(kPulse, standard_air(), 1.0, kPhotons);
  const bool ok_x = std::abs(r.prefactor_density / 27e-5 - 1.0) <= 0.20;
  const bool ok_p = std::abs(r.prefactor_water_vapor / -3.7e-10 - 1.0) <= 0.05;
  report(8, ok_x && ok_p,
         fmt("X prefactor = %.4e (target 27e-5), Pw prefactor = %.4e /Pa (target -3.7e-10)",
             r.prefactor_density, r.prefactor_water_vapor));
}

void purified_sensitivity() {
  const auto r = purified_ranging_sensitivity(kPulse, standard_air(), 1.0, kPhotons);
  const double full = r.delta_l_full, xonly = r.delta_l_density_only;
  const bool ok_full = full >= 2e-11 / 3 && full <= 2e-11 * 3;
  const bool ok_x = xonly >= 3e-13 / 3 && xonly <= 3e-13 * 3;
  const bool ordered = full > xonly && xonly > r.delta_l_unpurified;
  std::string detail = fmt("full = %.4e m, X-only = %.4e m (ratio to 3e-13: %.2f), unpurified = %.4e m", full,
               xonly, xonly / 3e-13, r.delta_l_unpurified);
  detail += std::string("; full ") + (ok_full ? "ok" : "out of band") + ", X-only " +
            (ok_x ? "ok" : "out of band") + ", ordering " + (ordered ? "ok" : "violated");
  report(9, ok_full && ok_x && ordered, detail);
}

void oracle_equivalence() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> wl(500e-9, 1600e-9), frac(0.05, 0.2), len(0.1, 100.0);
  std::uniform_real_distribution<double> t(-40, 100), pr(5e4, 1.2e5), co2(0, 0.1), hum(0, 1);
  double worst_c = 0.0, worst_k = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto p = pulse_at_wavelength(wl(rng), frac(rng));
    AirState s{t(rng), pr(rng), co2(rng), 0.0};
    s.water_vapor_pa = hum(rng) * 4000.0;
    const double l = len(rng);
    const auto tm = time_detection_modes(p);
    const auto rm = ranging_modes(p, s, l);
    for (const auto* a : {&tm.phase, &tm.group, &tm.gvd, &rm.length, &rm.density, &rm.water_vapor}) {
      const auto w = numeric_detection_mode(a->parameter, p, s, l);
      worst_c = std::max(worst_c, coeff_distance(w.mode, a->mode));
      worst_k = std::max(worst_k, rel(w.k_const, a->k_const));
    }
  }
  report(10, worst_c < 1e-3 && worst_k < 1e-3,
         fmt("10 configs x 6 parameters: max coefficient error %.2e, max K error %.2e", worst_c,
             worst_k));
}

void purification_orthogonality() {
  const auto m = ranging_modes(kPulse, standard_air(), 1.0);
  const auto r = purified_ranging_sensitivity(m, kPhotons);
  const double ox = std::abs(inner_product(r.purified_mode, m.density.mode));
  const double op = std::abs(inner_product(r.purified_mode, m.water_vapor.mode));
  const double dk = rel(r.k_full_closed_form, r.k_full_gram_schmidt);
  report(11, ox < 1e-10 && op < 1e-10 && dk < 1e-10,
         fmt("|<w_L^p,w_X>| = %.2e, |<w_L^p,w_Pw>| = %.2e, closed form vs Gram-Schmidt %.2e", ox,
             op, dk));
}

void monte_carlo() {
  SimConfig quiet{kPulse};
  quiet.lo = LoChoice::raw;
  quiet.samples = 100000;
  quiet.seed = 12;
  const auto q = run(quiet);
  const bool sigma_ok = std::abs(q.std_m - q.predicted_sigma_m) < 3 * q.std_standard_error_m;

  SimConfig noisy = quiet;
  noisy.spread = {0.0, 1e-6, 10.0};
  noisy.lo = LoChoice::purified;
  const auto pur = immunity_report(noisy);
  const bool immune = pur.immune.value_or(false);

  noisy.lo = LoChoice::raw;
  const auto raw = run(noisy);
  const auto report8 = contamination_report(kPulse, standard_air(), 1.0, kPhotons);
  const double sx = raw.density_slope->estimate, sp = raw.water_vapor_slope->estimate;
  const double dx = std::abs(sx - report8.prefactor_density * noisy.length_m) /
                    raw.density_slope->standard_error;
  const double dp = std::abs(sp - report8.prefactor_water_vapor * noisy.length_m) /
                    raw.water_vapor_slope->standard_error;
  const bool raw_ok = dx < 3 && dp < 3;

  const auto again = run(noisy);
  const bool identical = again.mean_m == raw.mean_m && again.std_m == raw.std_m &&
                         again.density_slope->estimate == sx &&
                         again.water_vapor_slope->estimate == sp;

  char buf[400];
  std::snprintf(buf, sizeof buf,
                "sigma %.4e vs predicted %.4e (%.2f SE); purified t = %.2f, %.2f; raw slope "
                "deviations %.2f, %.2f SE; rerun %s",
                q.std_m, q.predicted_sigma_m,
                std::abs(q.std_m - q.predicted_sigma_m) / q.std_standard_error_m,
                pur.result.density_slope->t_statistic(),
                pur.result.water_vapor_slope->t_statistic(), dx, dp,
                identical ? "bit-identical" : "differs");
  report(12, sigma_ok && immune && raw_ok && identical, buf);
}

void three_color_immunity() {
  const auto ws = equal_split({1064e-9, 532e-9, 355e-9}, kPhotons / 3);
  const auto c = synth_3wi(1064e-9, 532e-9, 355e-9);
  const Medium m = medium_of(standard_air());
  const double l = 1.0;
  // combination - L from refractivities; the L-sensitivity is d(combination)/dL
  auto combo = [&](const Medium& mm, double ll) { return combination_error(c, ws, mm, ll) + ll; };
  const double hl = 1e-6;
  const double s_l = (combo(m, l + hl) - combo(m, l - hl)) / (2 * hl);
  Medium xp = m, xm = m, pp = m, pm = m;
  xp.density_factor += 1e-4;
  xm.density_factor -= 1e-4;
  pp.water_vapor_pa += 50.0;
  const double s_x =
      (combination_error(c, ws, xp, l) - combination_error(c, ws, xm, l)) / 2e-4;
  const double s_p = (combination_error(c, ws, pp, l) - combination_error(c, ws, pm, l)) / 50.0;
  const double rx = std::abs(s_x / s_l), rp = std::abs(s_p / s_l);
  report(13, rx < 1e-10 && rp < 1e-10,
         fmt("beta = %.3f, gamma = %.3f, |dX|/|dL| = %.2e, |dPw|/|dL| = %.2e", *c.beta, *c.gamma,
             rx, rp));
}

template <class F>
void guarded(int id, F f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded(1, air_model_sanity);
  guarded(2, alpha_factor);
  guarded(3, two_color_noise);
  guarded(4, three_color_noise);
  guarded(5, mode_algebra_exactness);
  guarded(6, signal_cross_terms);
  guarded(7, displacement_sensitivity);
  guarded(8, contamination_prefactors);
  guarded(9, purified_sensitivity);
  guarded(10, oracle_equivalence);
  guarded(11, purification_orthogonality);
  guarded(12, monte_carlo);
  guarded(13, three_color_immunity);
  std::printf("%d of 13 criteria passed\n", 13 - failures);
  return failures == 0 ? 0 : 1;
}
