#include <cstdlib>
#include <string>

#include <gtest/gtest.h>

#include "eprqkd/errors.hpp"
#include "run_config.hpp"

namespace eprqkd::cli {
namespace {

const std::string kDefaultCfg = std::string(EPRQKD_DATA_DIR) + "/default.cfg";

std::string parse_error(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

TEST(RunConfig, DefaultFileMatchesBuiltInDefaults) {
  const auto c = load_run_config(kDefaultCfg);
  const RunConfig d;
  EXPECT_NO_THROW(validate(c));
  EXPECT_EQ(c.session.coincidences, d.session.coincidences);
  EXPECT_EQ(c.session.estimation_pairs, d.session.estimation_pairs);
  EXPECT_EQ(c.session.qber_threshold, d.session.qber_threshold);
  EXPECT_EQ(c.session.seed, d.session.seed);
  EXPECT_EQ(c.session.max_pairs_factor, d.session.max_pairs_factor);
  EXPECT_EQ(c.session.accumulation, d.session.accumulation);
  EXPECT_FALSE(c.attack.has_value());
  EXPECT_EQ(c.scan_pairs_per_point, d.scan_pairs_per_point);
  const auto& e = c.experiment;
  const auto& de = d.experiment;
  EXPECT_EQ(e.slit_x_mm, de.slit_x_mm);
  EXPECT_EQ(e.slit_p_mm, de.slit_p_mm);
  EXPECT_EQ(e.bob_x_centers_mm, de.bob_x_centers_mm);
  EXPECT_EQ(e.bob_p_centers_mm, de.bob_p_centers_mm);
  EXPECT_FALSE(e.alice_x_centers_mm.has_value());
  EXPECT_EQ(e.equalize, de.equalize);
  EXPECT_EQ(e.calibration.targets.var_x, de.calibration.targets.var_x);
  EXPECT_EQ(e.calibration.targets.var_p, de.calibration.targets.var_p);
  EXPECT_EQ(e.calibration.kappa_plus, de.calibration.kappa_plus);
  EXPECT_EQ(e.calibration.pump.waist_mm, de.calibration.pump.waist_mm);
  EXPECT_EQ(e.calibration.units.momentum_scale, de.calibration.units.momentum_scale);
  for (const auto* o : {&e.optics_A, &e.optics_B}) {
    EXPECT_EQ(o->object_distance_mm, de.optics_A.object_distance_mm);
    EXPECT_EQ(o->image_distance_mm, de.optics_A.image_distance_mm);
    EXPECT_EQ(o->focal_length_mm, de.optics_A.focal_length_mm);
    EXPECT_EQ(o->wavenumber_per_mm, de.optics_A.wavenumber_per_mm);
  }
  EXPECT_EQ(c.hash.size(), 64u);
  EXPECT_TRUE(d.hash.empty());
}

TEST(RunConfig, ParsesValues) {
  const auto c = parse_run_config(
      "# comment\n"
      "session.coincidences = 5000   # trailing\n"
      "session.accumulation = free_running\n"
      "detectors.alice_x_centers_mm = 1.1, 2.1\n"
      "attack.policy = always_p\n"
      "attack.p_cross = 0.3, 0.6\n"
      "source.sigma_minus_mm = 0.05\n"
      "source.kappa_minus_per_mm = 0.7\n"
      "output.dir = /tmp/out\n");
  EXPECT_EQ(c.session.coincidences, 5000u);
  EXPECT_EQ(c.session.accumulation, Accumulation::free_running);
  ASSERT_TRUE(c.experiment.alice_x_centers_mm.has_value());
  EXPECT_EQ((*c.experiment.alice_x_centers_mm)[1], 2.1);
  ASSERT_TRUE(c.attack.has_value());
  EXPECT_EQ(c.attack->policy, BasisPolicy::always_p);
  EXPECT_EQ(c.attack->resend.cross_basis[1], 0.6);
  ASSERT_TRUE(c.experiment.widths.has_value());
  EXPECT_EQ(c.experiment.widths->kappa_minus, 0.7);
  EXPECT_EQ(c.output_dir, "/tmp/out");
}

TEST(RunConfig, WavelengthSetsWavenumber) {
  const auto c = parse_run_config("station_B.wavelength_nm = 702\n");
  EXPECT_NEAR(c.experiment.optics_B.wavenumber_per_mm, 2 * M_PI / 702e-6, 1e-9);
  EXPECT_FALSE(parse_error("station_B.wavelength_nm = 702\nstation_B.wavenumber_per_mm = 450\n")
                   .empty());
}

TEST(RunConfig, RejectsUnknownDuplicateAndMalformed) {
  EXPECT_NE(parse_error("session.coincidences = 10\nsession.colour = red\n").find("line 2"),
            std::string::npos);
  EXPECT_NE(parse_error("session.seed = 1\nsession.seed = 2\n").find("line 2"), std::string::npos);
  EXPECT_FALSE(parse_error("session.coincidences = ten\n").empty());
  EXPECT_FALSE(parse_error("session.coincidences\n").empty());
  EXPECT_FALSE(parse_error("detectors.equalize = maybe\n").empty());
  EXPECT_FALSE(parse_error("detectors.bob_x_centers_mm = 1.0\n").empty());
  EXPECT_FALSE(parse_error("source.sigma_minus_mm = 0.05\n").empty());
}

TEST(RunConfig, ValidateCatchesSessionErrors) {
  auto c = parse_run_config("session.coincidences = 0\n");
  EXPECT_THROW(validate(c), ValidationError);
  c = parse_run_config("session.estimation_pairs = 60000\n");
  EXPECT_THROW(validate(c), ValidationError);
}

TEST(ResolveSeed, Precedence) {
  ::unsetenv(kSeedEnv);
  const RunConfig plain;
  EXPECT_EQ(resolve_seed(std::nullopt, plain), kDefaultSeed);
  ::setenv(kSeedEnv, "77", 1);
  EXPECT_EQ(resolve_seed(std::nullopt, plain), 77u);
  const auto with_seed = parse_run_config("session.seed = 9\n");
  EXPECT_EQ(resolve_seed(std::nullopt, with_seed), 9u);
  EXPECT_EQ(resolve_seed(5, with_seed), 5u);
  ::setenv(kSeedEnv, "abc", 1);
  EXPECT_THROW(resolve_seed(std::nullopt, plain), ValidationError);
  ::unsetenv(kSeedEnv);
}

}  // namespace
}  // namespace eprqkd::cli
