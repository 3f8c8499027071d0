#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "eprqkd/analysis.hpp"
#include "eprqkd/errors.hpp"

namespace eprqkd {

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

struct Normal {
  Mat4 jtj = Mat4::Zero();
  Vec4 jtr = Vec4::Zero();
  double chi_square = 0.0;
};

double model(const Vec4& t, double x) {
  const double z = (x - t[kCenter]) / t[kSigma];
  return t[kOffset] + t[kAmplitude] * std::exp(-0.5 * z * z);
}

double chi_square(const Vec4& t, std::span<const double> x, std::span<const double> y,
                  std::span<const double> w) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - model(t, x[i]);
    s += w[i] * r * r;
  }
  return s;
}

Normal normal_equations(const Vec4& t, std::span<const double> x, std::span<const double> y,
                        std::span<const double> w) {
  Normal n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = (x[i] - t[kCenter]) / t[kSigma];
    const double g = std::exp(-0.5 * z * z);
    Vec4 j;
    j[kAmplitude] = g;
    j[kCenter] = t[kAmplitude] * g * z / t[kSigma];
    j[kSigma] = t[kAmplitude] * g * z * z / t[kSigma];
    j[kOffset] = 1.0;
    const double r = y[i] - (t[kOffset] + t[kAmplitude] * g);
    n.jtj.noalias() += w[i] * j * j.transpose();
    n.jtr.noalias() += w[i] * r * j;
    n.chi_square += w[i] * r * r;
  }
  return n;
}

GaussianFit flat_fit(std::span<const double> y, std::span<const double> w) {
  GaussianFit fit;
  double sw = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sw += w[i];
    swy += w[i] * y[i];
  }
  fit.offset = swy / sw;
  fit.sigma_mm = std::numeric_limits<double>::quiet_NaN();
  fit.center_mm = std::numeric_limits<double>::quiet_NaN();
  fit.covariance[kOffset][kOffset] = 1.0 / sw;
  for (std::size_t i = 0; i < y.size(); ++i) {
    fit.chi_square += w[i] * (y[i] - fit.offset) * (y[i] - fit.offset);
  }
  fit.dof = y.size() - 1;
  fit.converged = true;
  fit.degenerate_flat = true;
  return fit;
}

}  // namespace

double GaussianFit::error(FitParameter p) const { return std::sqrt(covariance[p][p]); }

GaussianFit fit_gaussian(std::span<const double> positions, std::span<const std::uint64_t> counts,
                         const FitOptions& options) {
  std::vector<double> y(counts.size());
  std::transform(counts.begin(), counts.end(), y.begin(),
                 [](std::uint64_t c) { return static_cast<double>(c); });
  return fit_gaussian(positions, std::span<const double>(y), options);
}

GaussianFit fit_gaussian(std::span<const double> positions, std::span<const double> y,
                         const FitOptions& options) {
  if (positions.size() != y.size()) {
    throw ValidationError("fit: positions and counts differ in length");
  }
  if (y.size() < 5) throw ValidationError("fit: need at least 5 points");
  const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
  if (*lo_it == *hi_it) throw ValidationError("fit: all counts are equal");
  for (double v : y) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("fit: counts must be non-negative");
  }

  const std::size_t n = y.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::max(y[i], 1.0);
  if (max_min_ratio(y) < options.flat_ratio) return flat_fit(y, w);

  // Initial guess from the raw moments above the minimum.
  const double lo = *lo_it;
  const double hi = *hi_it;
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s0 += y[i] - lo;
    s1 += (y[i] - lo) * positions[i];
  }
  const double centroid = s1 / s0;
  double s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s2 += (y[i] - lo) * (positions[i] - centroid) * (positions[i] - centroid);
  }
  const double span_mm = positions.back() - positions.front();
  const double spacing = std::abs(span_mm) / static_cast<double>(n - 1);
  Vec4 t;
  t[kAmplitude] = hi - lo;
  t[kCenter] = centroid;
  t[kSigma] = std::max(std::sqrt(s2 / s0), 0.5 * spacing);
  t[kOffset] = lo;

  GaussianFit fit;
  double lambda = 1e-3;
  Normal ne = normal_equations(t, positions, y, w);
  for (fit.iterations = 1; fit.iterations <= options.max_iterations; ++fit.iterations) {
    Mat4 a = ne.jtj;
    a.diagonal() *= 1.0 + lambda;
    const Vec4 delta = a.ldlt().solve(ne.jtr);
    if (!delta.allFinite()) break;

    Vec4 trial = t + delta;
    trial[kSigma] = std::abs(trial[kSigma]);
    const double trial_chi = chi_square(trial, positions, y, w);
    double change = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double scale = std::max(std::abs(t[k]), 1e-12);
      change = std::max(change, std::abs(delta[k]) / scale);
    }
    if (trial_chi <= ne.chi_square) {
      t = trial;
      lambda = std::max(lambda * 0.1, 1e-12);
      ne = normal_equations(t, positions, y, w);
    } else {
      lambda *= 10.0;
    }
    if (change < options.relative_tolerance) {
      fit.converged = true;
      break;
    }
  }
  fit.iterations = std::min(fit.iterations, options.max_iterations);

  ne = normal_equations(t, positions, y, w);
  const Mat4 cov = ne.jtj.inverse();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) fit.covariance[r][c] = cov(r, c);
  }
  fit.amplitude = t[kAmplitude];
  fit.center_mm = t[kCenter];
  fit.sigma_mm = t[kSigma];
  fit.offset = t[kOffset];
  fit.chi_square = ne.chi_square;
  fit.dof = n - 4;
  if (!(fit.sigma_mm > 0.0) || !cov.allFinite()) fit.converged = false;
  return fit;
}

GaussianFit fit_gaussian(const ScanData& scan, const FitOptions& options) {
  scan.validate();
  return fit_gaussian(scan.positions_mm, scan.counts, options);
}

double conditional_variance(const GaussianFit& fit, double scale) {
  if (fit.degenerate_flat) throw ValidationError("conditional variance undefined for a flat fit");
  if (!fit.converged) throw ValidationError("conditional variance needs a converged fit");
  const double s = scale * fit.sigma_mm;
  return s * s;
}

VarianceMeasurement variance_from_fit(const GaussianFit& fit, double scale, std::string label) {
  VarianceMeasurement m;
  m.label = std::move(label);
  m.value = conditional_variance(fit, scale);
  m.uncertainty = 2.0 * scale * scale * fit.sigma_mm * fit.error(kSigma);
  return m;
}

}  // namespace eprqkd
