#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "eprqkd/analysis.hpp"
#include "eprqkd/errors.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "reference_data.hpp"

namespace eprqkd {
namespace {

using testing::default_experiment;

struct Profile {
  double amplitude, center, sigma, offset;
  double operator()(double x) const {
    const double z = (x - center) / sigma;
    return offset + amplitude * std::exp(-0.5 * z * z);
  }
};

std::vector<double> grid(double start, double step, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = start + i * step;
  return x;
}

TEST(FitGaussian, NoiselessProfileRecovered) {
  const Profile truth{1000, 1.5, 0.4, 10};
  const auto x = grid(0.0, 0.15, 21);
  std::vector<double> y;
  for (double v : x) y.push_back(truth(v));
  const auto f = fit_gaussian(x, std::span<const double>(y));
  ASSERT_TRUE(f.converged);
  EXPECT_FALSE(f.degenerate_flat);
  EXPECT_NEAR(f.amplitude, truth.amplitude, 1e-6 * truth.amplitude);
  EXPECT_NEAR(f.center_mm, truth.center, 1e-6);
  EXPECT_NEAR(f.sigma_mm, truth.sigma, 1e-6);
  EXPECT_NEAR(f.offset, truth.offset, 1e-6 * truth.amplitude);
  EXPECT_LT(f.chi_square, 1e-9);
  EXPECT_EQ(f.dof, 17u);
}

TEST(FitGaussian, FlatDataIsDegenerate) {
  const auto x = grid(0.0, 0.1, 31);
  std::vector<std::uint64_t> y;
  for (int i = 0; i < 31; ++i) y.push_back(1000 + (i % 3) * 20);
  const auto f = fit_gaussian(x, y);
  EXPECT_TRUE(f.degenerate_flat);
  EXPECT_TRUE(std::isnan(f.sigma_mm));
  EXPECT_NEAR(f.offset, 1020, 1.0);
  EXPECT_THROW(conditional_variance(f, 1.0), ValidationError);
}

TEST(FitGaussian, RejectsBadInput) {
  const auto x = grid(0.0, 0.1, 4);
  EXPECT_THROW(fit_gaussian(x, std::vector<std::uint64_t>{1, 5, 9, 2}), ValidationError);
  const auto x6 = grid(0.0, 0.1, 6);
  EXPECT_THROW(fit_gaussian(x6, std::vector<std::uint64_t>(6, 7)), ValidationError);
  EXPECT_THROW(fit_gaussian(x6, std::vector<std::uint64_t>{1, 2, 3}), ValidationError);
  EXPECT_THROW(fit_gaussian(x6, std::vector<double>{1, 2, -3, 4, 5, 1}), ValidationError);
}

TEST(FitGaussian, UncertaintyIsCalibrated) {
  // The 1-sigma interval should cover the true width about 68 % of the time.
  const Profile truth{500, 1.4, 0.35, 20};
  const auto x = grid(0.0, 0.1, 31);
  std::mt19937_64 rng(11);
  int covered = 0;
  const int trials = 200;
  for (int k = 0; k < trials; ++k) {
    std::vector<std::uint64_t> y;
    for (double v : x) y.push_back(std::poisson_distribution<std::uint64_t>(truth(v))(rng));
    const auto f = fit_gaussian(x, y);
    ASSERT_TRUE(f.converged);
    covered += std::abs(f.sigma_mm - truth.sigma) < f.error(kSigma);
  }
  EXPECT_GT(covered, 0.55 * trials);
  EXPECT_LT(covered, 0.80 * trials);
}

TEST(ConditionalVariance, Examples) {
  GaussianFit f;
  f.converged = true;
  f.sigma_mm = 0.39;
  EXPECT_NEAR(conditional_variance(f, 1.0), 0.152, 5e-4);
  f.sigma_mm = 0.318;
  EXPECT_NEAR(conditional_variance(f, 3.0), 9 * 0.318 * 0.318, 1e-12);
  f.covariance[kSigma][kSigma] = 0.01 * 0.01;
  const auto m = variance_from_fit(f, 3.0, "Ap1+Bp1");
  EXPECT_NEAR(m.uncertainty, 2 * 9 * 0.318 * 0.01, 1e-12);
  f.converged = false;
  EXPECT_THROW(conditional_variance(f, 1.0), ValidationError);
}

TEST(DuanCheck, ReferenceValues) {
  const auto ref = reference_variances();
  const auto r = duan_check(ref.x, ref.p);
  const double mx = (testing::kVarX[0] + testing::kVarX[1]) / 2;
  const double mp = (testing::kVarP[0] + testing::kVarP[1]) / 2;
  EXPECT_NEAR(r.product, mx * mp, 1e-12);
  EXPECT_NEAR(r.product, testing::kProductRounded, 0.005);
  EXPECT_TRUE(r.satisfied);
  EXPECT_EQ(r.bound, 0.25);

  const double ux = std::hypot(testing::kVarXErr[0], testing::kVarXErr[1]) / 2;
  const auto distance = [&](double last_err) {
    const double up = std::hypot(testing::kVarPErr[0], last_err) / 2;
    return (0.25 - mx * mp) / std::hypot(mp * ux, mx * up);
  };
  // The second momentum error is printed as 0.90; the library reads it as 0.090.
  EXPECT_EQ(ref.p[1].printed_uncertainty, testing::kVarPErr[1]);
  EXPECT_NEAR(r.sigma_distance, distance(0.090), 1e-9);
  EXPECT_GT(r.sigma_distance, 20);
  EXPECT_LT(distance(testing::kVarPErr[1]), 3);
}

TEST(DuanCheck, BoundaryAndMonotonicity) {
  const std::vector<double> half{0.5};
  EXPECT_FALSE(duan_check(half, half).satisfied);
  EXPECT_EQ(duan_check(half, half).sigma_distance, 0.0);
  const std::vector<double> ones{1.0, 1.0};
  EXPECT_FALSE(duan_check(ones, ones).satisfied);
  const std::vector<double> small{0.1};
  const std::vector<double> smaller{0.09};
  EXPECT_LT(duan_check(smaller, ones).product, duan_check(small, ones).product);
  EXPECT_TRUE(std::isinf(duan_check(small, ones).sigma_distance));
  EXPECT_THROW(duan_check(std::vector<double>{}, ones), ValidationError);
  EXPECT_THROW(duan_check(std::vector<double>{0.0}, ones), ValidationError);
}

TEST(PoissonErrors, RoundsToPublishedBars) {
  const std::vector<std::uint64_t> c{943, 22, 0};
  const auto e = poisson_errors(c);
  EXPECT_EQ(std::lround(e[0]), 31);
  EXPECT_EQ(std::lround(e[1]), 5);
  EXPECT_EQ(e[2], 1.0);
}

TEST(PoissonErrors, PublishedTableAgreesExceptOneCell) {
  // Bx2/Ap2 is printed as 765 +- 26 while sqrt(765) rounds to 28.
  int mismatches = 0;
  for (int b = 0; b < 4; ++b)
    for (int a = 0; a < 4; ++a) {
      const std::uint64_t n = testing::kPublishedBobRows[b][a];
      const auto e = poisson_errors(std::span<const std::uint64_t>(&n, 1));
      if (std::lround(e[0]) != static_cast<long>(testing::kPublishedErrors[b][a])) {
        ++mismatches;
        EXPECT_EQ(n, 765u);
        EXPECT_EQ(std::lround(e[0]), 28);
      }
    }
  EXPECT_EQ(mismatches, 1);
}

TEST(ScanGrid, ParseAndPoints) {
  const auto g = ScanGrid::parse("0:3:0.1");
  const auto p = g.points();
  ASSERT_EQ(p.size(), 31u);
  EXPECT_NEAR(p.back(), 3.0, 1e-12);
  EXPECT_EQ(ScanGrid::parse("0.5:1:0.25").points().size(), 3u);
  EXPECT_THROW(ScanGrid::parse("0:3:0"), ValidationError);
  EXPECT_THROW(ScanGrid::parse("0:3:-0.1"), ValidationError);
  EXPECT_THROW(ScanGrid::parse("3:0:0.1"), ValidationError);
  EXPECT_THROW(ScanGrid::parse("0:3"), ValidationError);
  EXPECT_THROW(ScanGrid::parse("0:a:0.1"), ValidationError);
}

TEST(ScanSimulation, DeterministicAndMatchesOracle) {
  const auto& e = default_experiment();
  const auto ax1 = DetectorLabel::parse("Ax1");
  const std::vector<double> positions{0.5, 1.0, 1.5, 2.0};
  const std::uint64_t n = 2'000'000;
  const auto a = scan_simulation(e.source, e.aligned, ax1, Basis::x, positions, n, 5);
  const auto b = scan_simulation(e.source, e.aligned, ax1, Basis::x, positions, n, 5);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.fixed_detector, ax1);
  // Bob's slits sit at 1.0 and 2.0, so those two points are oracle cells.
  for (int k : {1, 3}) {
    const double p = testing::coincidence_oracle(e.source, e.aligned, Basis::x, Basis::x, 0, k / 2);
    EXPECT_NEAR(static_cast<double>(a.counts[k]), n * p, 4 * testing::binomial_sigma(n, p) + 1)
        << positions[k];
  }
  EXPECT_GT(a.counts[1], a.counts[0]);
  EXPECT_GT(a.counts[1], a.counts[2]);
  EXPECT_THROW(scan_simulation(e.source, e.aligned, DetectorLabel::parse("Bx1"), Basis::x,
                               positions, n, 5),
               ValidationError);
  const std::vector<double> unsorted{1.0, 0.5};
  EXPECT_THROW(scan_simulation(e.source, e.aligned, ax1, Basis::x, unsorted, n, 5), ValidationError);
}

TEST(ScanSimulation, FitWidthAgreesWithProfileModel) {
  const auto& e = default_experiment();
  const auto positions = ScanGrid{}.points();
  const auto scan = scan_simulation(e.source, e.aligned, DetectorLabel::parse("Ax2"), Basis::x,
                                    positions, 5'000'000, 21);
  const auto f = fit_gaussian(scan);
  ASSERT_TRUE(f.converged);
  const auto profile = detected_profile(e.source, e.aligned, Basis::x, 1);
  EXPECT_NEAR(f.center_mm, profile.mean_mm, 3 * f.error(kCenter) + 0.01);
  EXPECT_NEAR(f.sigma_mm * f.sigma_mm, profile.variance_mm2, 0.1 * profile.variance_mm2);
}

TEST(ScanSimulation, MixedBasesAreFlat) {
  const auto& e = default_experiment();
  const auto positions = ScanGrid{}.points();
  const auto scan = scan_simulation(e.source, e.aligned, DetectorLabel::parse("Ax1"), Basis::p,
                                    positions, 5'000'000, 22);
  EXPECT_TRUE(is_flat(scan));
  EXPECT_TRUE(fit_gaussian(scan).degenerate_flat);
}

}  // namespace
}  // namespace eprqkd
