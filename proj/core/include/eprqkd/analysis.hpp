#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eprqkd/basis.hpp"
#include "eprqkd/detection.hpp"
#include "eprqkd/source_model.hpp"

namespace eprqkd {

/// Coincidence counts with Alice's detector fixed while Bob's slit is scanned.
struct ScanData {
  std::vector<double> positions_mm;  ///< Bob's slit centers, detection plane
  std::vector<std::uint64_t> counts;
  DetectorLabel fixed_detector;      ///< Alice's detector held in place
  Basis basis_B = Basis::x;

  Basis basis_A() const { return fixed_detector.basis; }
  std::size_t size() const { return counts.size(); }
  /// Equal-length lists.
  void validate() const;
};

/// Parameter order used by covariance: amplitude, center, sigma, offset.
enum FitParameter { kAmplitude = 0, kCenter = 1, kSigma = 2, kOffset = 3 };

struct GaussianFit {
  double amplitude = 0.0;  ///< counts
  double center_mm = 0.0;
  double sigma_mm = 0.0;   ///< NaN for a degenerate flat fit
  double offset = 0.0;     ///< counts
  std::array<std::array<double, 4>, 4> covariance{};
  double chi_square = 0.0;
  std::size_t dof = 0;
  int iterations = 0;
  bool converged = false;
  /// Data too flat for a peak; only the offset is meaningful.
  bool degenerate_flat = false;

  double error(FitParameter p) const;
};

struct FitOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-8;
  /// max/min count ratio below which the scan is treated as flat.
  double flat_ratio = 1.3;
};

/// Weighted Levenberg-Marquardt fit of offset + A exp(-(x - c)^2 / (2 sigma^2)),
/// weights 1 / max(count, 1). Flat data returns an offset-only fit with
/// degenerate_flat set. Throws ValidationError for fewer than 5 points,
/// mismatched lengths, or all counts equal.
GaussianFit fit_gaussian(const ScanData& scan, const FitOptions& options = {});

/// Fit on raw arrays; same contract as above.
GaussianFit fit_gaussian(std::span<const double> positions, std::span<const std::uint64_t> counts,
                         const FitOptions& options = {});
/// Non-integer data (e.g. noiseless synthetic profiles), weights 1 / max(value, 1).
GaussianFit fit_gaussian(std::span<const double> positions, std::span<const double> values,
                         const FitOptions& options = {});

/// (scale * sigma)^2. Throws ValidationError for flat or unconverged fits.
double conditional_variance(const GaussianFit& fit, double scale);

/// One measured conditional variance with its 1-sigma uncertainty.
struct VarianceMeasurement {
  std::string label;  ///< e.g. "Ax1-Bx1" or "Ap2+Bp2"
  double value = 0.0;
  double uncertainty = 0.0;
  /// Set when the quoted uncertainty differs from the one used.
  std::optional<double> printed_uncertainty;
  std::string note;
};

/// Variance measurement from a scan fit, with first-order error from the fit
/// covariance.
VarianceMeasurement variance_from_fit(const GaussianFit& fit, double scale, std::string label);

struct EprCheckResult {
  std::vector<VarianceMeasurement> var_x_minus;  ///< mm^2
  std::vector<VarianceMeasurement> var_p_plus;   ///< hbar^2/mm^2
  double mean_x = 0.0;
  double mean_p = 0.0;
  double product = 0.0;              ///< hbar^2
  double product_uncertainty = 0.0;  ///< hbar^2
  double bound = 0.25;               ///< hbar^2
  bool satisfied = false;            ///< product < bound
  double sigma_distance = 0.0;       ///< (bound - product) / product_uncertainty
};

/// Product of the per-axis mean variances against the separability bound.
/// Throws ValidationError on empty lists or non-positive variances.
EprCheckResult duan_check(std::vector<VarianceMeasurement> var_x,
                          std::vector<VarianceMeasurement> var_p);
EprCheckResult duan_check(std::span<const double> var_x, std::span<const double> var_p);

/// sqrt(count), with count 0 treated as 1.
std::vector<double> poisson_errors(std::span<const std::uint64_t> counts);

/// start:stop:step in mm, stop inclusive.
struct ScanGrid {
  double start = 0.0;
  double stop = 3.0;
  double step = 0.1;

  /// Throws ValidationError unless step > 0 and stop > start.
  std::vector<double> points() const;
  static ScanGrid parse(std::string_view text);
};

/// Monte Carlo scan: for each position Bob's `basis_B` slit (his configured
/// width) is centered there, `pairs_per_point` pairs are emitted, and
/// geometric coincidences with Alice's fixed detector are counted. Each point
/// uses its own random stream derived from `seed`, so results do not depend
/// on evaluation order. Transmissions are ignored.
ScanData scan_simulation(const SourceModel& source, const StationPair& stations,
                         const DetectorLabel& fixed_detector, Basis basis_B,
                         std::span<const double> positions, std::uint64_t pairs_per_point,
                         std::uint64_t seed);

/// max / max(min, 1) below `ratio`.
bool is_flat(const ScanData& scan, double ratio = 1.3);
double max_min_ratio(std::span<const std::uint64_t> counts);
double max_min_ratio(std::span<const double> values);

/// The four published conditional variances: two position pairings (mm^2)
/// and two momentum pairings (hbar^2/mm^2).
struct ReferenceVariances {
  std::vector<VarianceMeasurement> x;
  std::vector<VarianceMeasurement> p;
};
ReferenceVariances reference_variances();

}  // namespace eprqkd
