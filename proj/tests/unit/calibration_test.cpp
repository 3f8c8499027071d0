#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "eprqkd/calibration.hpp"
#include "eprqkd/errors.hpp"
#include "fixtures.hpp"

namespace eprqkd {
namespace {

using testing::default_experiment;

TEST(Calibration, RoundTripHitsTargets) {
  const auto& e = default_experiment();
  const CalibrationInputs in;
  EXPECT_NEAR(detected_variance(e.source, e.aligned, Basis::x, in.units), in.targets.var_x, 1e-4 * in.targets.var_x);
  EXPECT_NEAR(detected_variance(e.source, e.aligned, Basis::p, in.units), in.targets.var_p, 1e-4 * in.targets.var_p);
  EXPECT_DOUBLE_EQ(e.source.sigma_plus(), in.pump.waist_mm);
  EXPECT_DOUBLE_EQ(e.source.kappa_plus(), in.kappa_plus);
  EXPECT_TRUE(e.source.entangled());
}

TEST(Calibration, RecalibratingIsStable) {
  const auto& e = default_experiment();
  const auto again = calibrate_source(CalibrationInputs{}, e.aligned);
  EXPECT_NEAR(again.sigma_minus(), e.source.sigma_minus(), 1e-6);
  EXPECT_NEAR(again.kappa_minus(), e.source.kappa_minus(), 1e-6);
}

TEST(Calibration, FloorsAreTheSlitConvolution) {
  // With perfect correlation Alice's slit maps one to one onto Bob's plane, so
  // the profile is the convolution of two uniform slits.
  const auto& e = default_experiment();
  const CalibrationInputs in;
  const double wx = 0.2, wp = 0.5;
  EXPECT_NEAR(slit_floor(e.aligned, Basis::x, in), 2 * wx * wx / 12, 2e-4);
  EXPECT_NEAR(slit_floor(e.aligned, Basis::p, in), 9 * 2 * wp * wp / 12, 2e-3);
}

TEST(Calibration, TargetBelowFloorNamesTheBasis) {
  const auto& e = default_experiment();
  CalibrationInputs in;
  in.targets.var_x = 0.005;
  try {
    calibrate_source(in, e.aligned);
    FAIL() << "expected CalibrationError";
  } catch (const CalibrationError& err) {
    EXPECT_NE(std::string(err.what()).find("x basis"), std::string::npos) << err.what();
  }
  in = CalibrationInputs{};
  in.targets.var_p = 0.3;
  try {
    calibrate_source(in, e.aligned);
    FAIL() << "expected CalibrationError";
  } catch (const CalibrationError& err) {
    EXPECT_NE(std::string(err.what()).find("p basis"), std::string::npos) << err.what();
  }
}

TEST(Calibration, VarianceGrowsWithWidth) {
  const auto& e = default_experiment();
  const auto w = e.source.widths();
  auto wider = w;
  wider.sigma_minus *= 1.5;
  const auto s = build_source(wider, e.source.pump());
  EXPECT_GT(detected_variance(s, e.aligned, Basis::x), detected_variance(e.source, e.aligned, Basis::x));
}

TEST(DetectedProfile, MatchesMonteCarlo) {
  const auto& e = default_experiment();
  for (Basis b : kBases) {
    for (int det = 0; det < 2; ++det) {
      const auto profile = detected_profile(e.source, e.aligned, b, det);
      const auto& slit = e.aligned.alice.detector(b, det);
      RandomStream rng(17, det + 2 * static_cast<int>(b));
      double n = 0, s1 = 0, s2 = 0;
      for (int i = 0; i < 4'000'000; ++i) {
        const auto q = sample_quadratures(e.source, b, b, rng);
        if (!slit.contains(e.aligned.alice.to_detector(b, q.a))) continue;
        const double y = e.aligned.bob.to_detector(b, q.b);
        n += 1;
        s1 += y;
        s2 += y * y;
      }
      ASSERT_GT(n, 10000);
      const double mean = s1 / n;
      const double bob_w = e.aligned.bob.detector(b, det).width_mm;
      const double var = s2 / n - mean * mean + bob_w * bob_w / 12;
      EXPECT_NEAR(mean, profile.mean_mm, 0.01) << to_string(b) << det;
      EXPECT_NEAR(var / profile.variance_mm2, 1.0, 0.04) << to_string(b) << det;
    }
  }
}

}  // namespace
}  // namespace eprqkd
