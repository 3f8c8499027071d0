#pragma once

#include <array>
#include <optional>

#include "eprqkd/calibration.hpp"
#include "eprqkd/detection.hpp"
#include "eprqkd/source_model.hpp"

namespace eprqkd {

/// Everything needed to set up the default apparatus: optics, slits, Bob's
/// detector centers, and the calibration targets. Alice's centers are found
/// by alignment unless given.
struct ExperimentSpec {
  StationOptics optics_A;
  StationOptics optics_B;
  double slit_x_mm = 0.2;
  double slit_p_mm = 0.5;
  std::array<double, 2> bob_x_centers_mm{1.0, 2.0};
  std::array<double, 2> bob_p_centers_mm{1.0, 2.0};
  std::optional<std::array<double, 2>> alice_x_centers_mm;
  std::optional<std::array<double, 2>> alice_p_centers_mm;
  bool equalize = true;
  CalibrationInputs calibration;
  /// Explicit widths skip calibration (sigma_plus still defaults to the pump waist).
  std::optional<SourceWidths> widths;
  /// Calibrate / align passes; Alice's centers and the widths depend on each other.
  int alignment_passes = 3;
};

struct Experiment {
  SourceModel source;
  StationPair aligned;   ///< after alignment, before neutral filters
  StationPair stations;  ///< what sessions and scans use
  std::optional<LevelEqualization> equalization;
};

/// Calibrates the source, aligns Alice's detectors to Bob's, and applies the
/// neutral-filter equalization. Throws ValidationError / CalibrationError.
Experiment make_experiment(const ExperimentSpec& spec);

}  // namespace eprqkd
