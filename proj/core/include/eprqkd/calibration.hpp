#pragma once

#include "eprqkd/basis.hpp"
#include "eprqkd/detection.hpp"
#include "eprqkd/source_model.hpp"

namespace eprqkd {

/// Conversion from detection-plane millimetres to the units variances are
/// reported in: mm for positions, hbar/mm for momenta.
struct ReadoutUnits {
  double position_scale = 1.0;  ///< reported mm per detection-plane mm
  double momentum_scale = 3.0;  ///< reported hbar/mm per detection-plane mm

  double scale(Basis basis) const { return basis == Basis::x ? position_scale : momentum_scale; }
};

/// Coincidence profile seen when Bob's slit is scanned across the detection
/// plane with Alice's detector fixed. Moments are over the scan coordinate.
struct DetectedProfile {
  double mean_mm = 0.0;       ///< expected peak position (detection plane)
  double variance_mm2 = 0.0;  ///< profile variance (detection plane)
  double reported = 0.0;      ///< variance_mm2 converted with ReadoutUnits
};

/// Moments of the scan profile, by quadrature over Alice's slit of the
/// Gaussian conditional moments, plus Bob's slit width^2 / 12.
DetectedProfile detected_profile(const SourceModel& source, const StationPair& stations,
                                 Basis basis, int det_A, const ReadoutUnits& units = {});

/// Mean of detected_profile(...).reported over Alice's two detectors.
double detected_variance(const SourceModel& source, const StationPair& stations, Basis basis,
                         const ReadoutUnits& units = {});

struct CalibrationTargets {
  double var_x = 0.116;  ///< detected Delta^2(x_A - x_B), mm^2
  double var_p = 0.894;  ///< detected Delta^2(p_A + p_B), hbar^2/mm^2
};

struct CalibrationInputs {
  CalibrationTargets targets;
  PumpProfile pump;
  double kappa_plus = 40.0;  ///< held fixed; sets the far-field single-photon spread
  ReadoutUnits units;
};

/// Solves sigma_minus and kappa_minus (bracketed root finding, one per basis)
/// so that detected_variance matches each target; sigma_plus is the pump
/// waist. Throws CalibrationError naming the basis if a target lies below the
/// slit-convolution floor or above the reachable range, or if the solution is
/// unphysical.
SourceModel calibrate_source(const CalibrationInputs& inputs, const StationPair& stations);

/// detected_variance in the sigma_minus -> 0 (x) or kappa_minus -> 0 (p) limit.
double slit_floor(const StationPair& stations, Basis basis, const CalibrationInputs& inputs);

}  // namespace eprqkd
