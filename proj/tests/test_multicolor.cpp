#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "comb_ranger/detection.hpp"
#include "comb_ranger/multicolor.hpp"
#include "test_support.hpp"

using namespace comb_ranger;
using test_support::rel_err;

namespace {

const WavelengthSet kPair = equal_split({1064e-9, 532e-9}, 4e16);
const WavelengthSet kTriple = equal_split({1064e-9, 532e-9, 355e-9}, 8e16 / 3);

}  // namespace

TEST(WavelengthSet, Validation) {
  EXPECT_THROW(validate(equal_split({800e-9}, 1e10)), ValidationError);
  EXPECT_THROW(validate(equal_split({800e-9, 800e-9}, 1e10)), ValidationError);
  EXPECT_THROW(validate(equal_split({800e-9, 100e-9}, 1e10)), ValidationError);
  EXPECT_THROW(validate(equal_split({800e-9, 600e-9}, 0.5)), ValidationError);
  EXPECT_THROW(validate(WavelengthSet{{800e-9, 600e-9}, {1e10}}), ValidationError);
  EXPECT_NO_THROW(validate(kTriple));
}

TEST(PhaseLengths, Basics) {
  const auto v = phase_lengths(kPair, vacuum(), 2.0);
  EXPECT_EQ(v[0], 2.0);
  EXPECT_EQ(v[1], 2.0);
  const auto a = phase_lengths(kPair, standard_air(), 1.0);
  EXPECT_GT(a[1], a[0]);
  EXPECT_NEAR(a[0] - 1.0, 2.7e-4, 0.1e-4);
}

TEST(Alpha2wi, Values) {
  EXPECT_NEAR(alpha_2wi(1064e-9, 532e-9), 64.9217, 1e-3);
  const double a = alpha_2wi(1064e-9, 532e-9);
  EXPECT_LT(rel_err(alpha_2wi(532e-9, 1064e-9), -(1 + a)), 1e-12);
}

TEST(Alpha2wi, DryReconstructionExact) {
  std::mt19937_64 rng(47);
  const auto c = combine_2wi(1064e-9, 532e-9);
  for (int i = 0; i < 100; ++i) {
    AirState s = test_support::random_state(rng);
    s.water_vapor_pa = 0.0;
    const double l = 1.0 + i;
    EXPECT_LT(std::abs(combine(c, phase_lengths(kPair, s, l)) - l) / l, 1e-12);
    EXPECT_LT(std::abs(combination_error(c, kPair, medium_of(s), l)) / l, 1e-15);
  }
}

TEST(ShotNoise2wi, Values) {
  EXPECT_NEAR(shot_noise_2wi(kPair), 3.1108e-14, 1e-18);
  // alpha -> 0: a combination with weights (1, 0) is the single-color limit
  MulticolorCombination single{"2wi", {1.0, 0.0}, 0.0, std::nullopt, std::nullopt, 0, 0};
  EXPECT_EQ(shot_noise(kPair, single), single_color_shot_noise(1064e-9, 4e16));
}

TEST(ShotNoise2wi, DegradesTowardDegeneracy) {
  double prev = 0.0;
  for (double l2 : {532e-9, 700e-9, 900e-9, 1000e-9, 1050e-9, 1063e-9}) {
    const double n = shot_noise_2wi(equal_split({1064e-9, l2}, 4e16));
    EXPECT_GT(n, prev) << l2;
    prev = n;
  }
  EXPECT_GT(prev / shot_noise_2wi(kPair), 100.0);
}

TEST(Humidity2wi, Bias) {
  AirState s = standard_air();
  EXPECT_EQ(humidity_systematic_2wi(kPair, s, 100.0), 0.0);
  s.water_vapor_pa = 1000.0;
  const double b1 = humidity_systematic_2wi(kPair, s, 100.0);
  EXPECT_NEAR(b1, -1.04e-4, 0.01e-4);
  s.water_vapor_pa = 2000.0;
  EXPECT_LT(rel_err(humidity_systematic_2wi(kPair, s, 100.0), 2 * b1), 1e-6);
}

TEST(Synth3wi, CancelsDensityAndWaterVapor) {
  const auto c = synth_3wi(1064e-9, 532e-9, 355e-9);
  EXPECT_NEAR(*c.beta, 2354.83, 0.01);
  EXPECT_NEAR(*c.gamma, -871.013, 0.001);
  const double k1 = k_dispersion(Wavenumber::from_wavelength(1064e-9));
  const double g1 = water_term(Wavenumber::from_wavelength(1064e-9));
  EXPECT_LT(std::abs(c.residual_density) / k1, 1e-12);
  EXPECT_LT(std::abs(c.residual_water_vapor) / g1, 1e-12);
  EXPECT_NEAR(c.weights[0] + c.weights[1] + c.weights[2], 1.0, 1e-12);
}

TEST(Synth3wi, ReconstructionOnRandomStates) {
  std::mt19937_64 rng(53);
  const auto c = synth_3wi(1064e-9, 532e-9, 355e-9);
  for (int i = 0; i < 100; ++i) {
    const auto s = test_support::random_state(rng);
    EXPECT_LT(std::abs(combination_error(c, kTriple, medium_of(s), 10.0)), 1e-10 * 10.0);
  }
}

TEST(Synth3wi, FiniteDifferenceImmunity) {
  const auto c = synth_3wi(1064e-9, 532e-9, 355e-9);
  const Medium m = medium_of(standard_air());
  const double l = 1.0;
  auto err = [&](Medium mm, double ll) { return combination_error(c, kTriple, mm, ll) + ll; };
  const double dl = (err(m, l + 1e-6) - err(m, l - 1e-6)) / 2e-6;
  Medium xp = m, xm = m, pp = m, pm = m;
  xp.density_factor += 1e-3;
  xm.density_factor -= 1e-3;
  pp.water_vapor_pa += 10;
  pm.water_vapor_pa = std::max(0.0, pm.water_vapor_pa - 10);
  const double dx = (combination_error(c, kTriple, xp, l) - combination_error(c, kTriple, xm, l)) / 2e-3;
  const double dp = (combination_error(c, kTriple, pp, l) - combination_error(c, kTriple, pm, l)) /
                    (pp.water_vapor_pa - pm.water_vapor_pa);
  EXPECT_LT(std::abs(dx / dl), 1e-10);
  EXPECT_LT(std::abs(dp / dl), 1e-10);
}

TEST(Synth3wi, Degenerate) {
  EXPECT_THROW(synth_3wi(1064e-9, 1064e-9, 355e-9), ValidationError);
}

TEST(ShotNoise3wi, Values) {
  const auto c = synth_3wi(1064e-9, 532e-9, 355e-9);
  const double n = shot_noise_3wi(kTriple, c);
  EXPECT_NEAR(n, 9.932e-13, 1e-16);
  EXPECT_GT(n / shot_noise_2wi(equal_split({1064e-9, 532e-9}, 4e16)), 10.0);
  MulticolorCombination trivial{"3wi", {1, 0, 0}, std::nullopt, 0.0, 0.0, 0, 0};
  EXPECT_EQ(shot_noise_3wi(kTriple, trivial), single_color_shot_noise(1064e-9, 8e16 / 3));
}

TEST(Ranking, CombVersusTwoColor) {
  // X-only purified comb ranging is noisier than 2WI but, unlike 2WI, it is
  // immune to humidity once fully purified
  const auto r = purified_ranging_sensitivity(pulse_at_wavelength(800e-9, 1.0 / 6), standard_air(),
                                              1.0, 8e16);
  EXPECT_GT(r.delta_l_density_only, shot_noise_2wi(kPair));
}

TEST(ComparisonCsv, Format) {
  std::ostringstream os;
  write_comparison_csv(os, {compare(kPair, standard_air(), 1.0), compare(kTriple, standard_air(), 1.0)});
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "scheme,wavelengths_nm,photons,alpha,beta,gamma,shot_noise_m,humidity_bias_m");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("2wi,1064;532,4e+16;4e+16,6.49", 0), 0u) << line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("3wi,1064;532;355,", 0), 0u) << line;
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7);
}
