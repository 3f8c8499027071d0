#pragma once

#include <array>
#include <cstdint>

#include "eprqkd/basis.hpp"
#include "eprqkd/random.hpp"
#include "eprqkd/source_model.hpp"

namespace eprqkd {

/// Slit in front of a single-photon counter. Detector index 0 carries logical
/// bit 0, index 1 carries bit 1.
struct SlitDetector {
  double center_mm = 0.0;  ///< detection-plane coordinate
  double width_mm = 0.0;
  /// Neutral-filter transmission in (0, 1]. Clicks are thinned independently.
  double transmission = 1.0;

  double lower() const { return center_mm - 0.5 * width_mm; }
  double upper() const { return center_mm + 0.5 * width_mm; }
  bool contains(double coordinate) const {
    return coordinate >= lower() && coordinate <= upper();
  }
};

using DetectorPair = std::array<SlitDetector, 2>;

enum class ClickOutcome : std::uint8_t { Detector1, Detector2, Null };

inline bool is_click(ClickOutcome c) { return c != ClickOutcome::Null; }
/// 0 for Detector1, 1 for Detector2. Undefined for Null.
inline int logical_bit(ClickOutcome c) { return c == ClickOutcome::Detector2 ? 1 : 0; }
inline ClickOutcome outcome_for_index(int index) {
  return index == 0 ? ClickOutcome::Detector1 : ClickOutcome::Detector2;
}

/// Lens geometry of one station.
struct StationOptics {
  double object_distance_mm = 200.0;  ///< crystal to imaging lens
  double image_distance_mm = 600.0;   ///< imaging lens to detector
  double focal_length_mm = 150.0;     ///< Fourier lens
  double wavenumber_per_mm = 450.0;   ///< k entering the Fourier mapping
};

/// One party's optics and detectors. Construct through StationConfig::make,
/// which enforces positive optics, positive widths, and disjoint slits.
class StationConfig {
 public:
  static StationConfig make(const StationOptics& optics, const DetectorPair& x_detectors,
                            const DetectorPair& p_detectors);

  const StationOptics& optics() const { return optics_; }
  /// O / (2 I); crystal coordinate = magnification_parameter * detector coordinate.
  double magnification_parameter() const {
    return optics_.object_distance_mm / (2.0 * optics_.image_distance_mm);
  }
  /// f / k; detector coordinate = fourier_scale * crystal-plane momentum.
  double fourier_scale() const { return optics_.focal_length_mm / optics_.wavenumber_per_mm; }

  /// Latent crystal-plane value -> detection-plane coordinate (mm).
  double to_detector(Basis basis, double crystal) const;
  double to_crystal(Basis basis, double detector) const;

  const DetectorPair& detectors(Basis basis) const {
    return basis == Basis::x ? x_detectors_ : p_detectors_;
  }
  const SlitDetector& detector(Basis basis, int index) const { return detectors(basis)[index]; }

  StationConfig with_detectors(Basis basis, const DetectorPair& detectors) const;
  /// Same geometry with every transmission reset to 1.
  StationConfig without_filters() const;

 private:
  StationConfig() = default;

  StationOptics optics_;
  DetectorPair x_detectors_{};
  DetectorPair p_detectors_{};
};

struct StationPair {
  StationConfig alice;
  StationConfig bob;

  const StationConfig& operator[](Side side) const { return side == Side::A ? alice : bob; }
  StationConfig& operator[](Side side) { return side == Side::A ? alice : bob; }
};

/// Detection-plane coordinate a station reads for this pair in `basis`.
double readout_coordinate(const PairSample& sample, const StationConfig& station, Basis basis,
                          Side side);

/// Geometric slit test, closed intervals. No thinning.
ClickOutcome click(double coordinate, const DetectorPair& detectors);

/// Slit test followed by independent thinning with each detector's
/// transmission. Draws from `rng` only when the hit detector has
/// transmission < 1.
ClickOutcome detect(double coordinate, const DetectorPair& detectors, RandomStream& rng);

struct QuadratureResult {
  double value = 0.0;
  double error_bound = 0.0;
};

/// Absolute error the coincidence oracle guarantees.
inline constexpr double kCoincidenceTolerance = 1e-8;

/// Probability that a single emitted pair gives a coincidence at
/// (det_A, det_B), both stations measuring in the stated bases. Nested
/// adaptive quadrature of joint_density over the two slit windows mapped to
/// crystal coordinates, scaled by both transmissions. Throws ConvergenceError
/// if the error bound exceeds kCoincidenceTolerance.
QuadratureResult coincidence_probability(const SourceModel& source, const StationPair& stations,
                                         Basis basis_A, Basis basis_B, int det_A, int det_B);

/// Closed-form single-party click probability (marginal mass in the slit,
/// times transmission).
double single_click_probability(const SourceModel& source, const StationConfig& station,
                                Basis basis, int det);

/// All 16 oracle probabilities, indexed [alice channel][bob channel] in the
/// {x1, x2, p1, p2} ordering.
std::array<std::array<double, 4>, 4> coincidence_matrix(const SourceModel& source,
                                                        const StationPair& stations);

/// Cell factors that bring each diagonal probability down to the smallest.
/// Input and output are in {x1, x2, p1, p2} order.
std::array<double, 4> equalization_factors(const std::array<double, 4>& diagonal);

struct LevelEqualization {
  std::array<double, 4> cell_factors{};   ///< applied to each same-basis "right" cell
  std::array<double, 4> alice_factors{};  ///< per Alice detector, {x1, x2, p1, p2}
  std::array<double, 4> bob_factors{};
  StationPair stations;
};

/// Neutral-filter equalization of the four same-basis "right" coincidence
/// levels. Each cell factor is split evenly (square root) between the two
/// detectors of the cell, which keeps the mixed-basis cells close to each
/// other. Throws ValidationError if any diagonal probability is zero.
LevelEqualization equalize_levels(const SourceModel& source, const StationPair& stations);

/// Re-centers Alice's detectors so each maximizes its same-basis "right"
/// coincidence probability with Bob's corresponding detector.
StationPair align_alice_detectors(const SourceModel& source, const StationPair& stations);

}  // namespace eprqkd
