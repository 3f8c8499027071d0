#include "eprqkd/experiment.hpp"

#include "eprqkd/errors.hpp"

namespace eprqkd {

namespace {

DetectorPair slits(std::array<double, 2> centers, double width) {
  return {SlitDetector{centers[0], width, 1.0}, SlitDetector{centers[1], width, 1.0}};
}

}  // namespace

Experiment make_experiment(const ExperimentSpec& spec) {
  const StationConfig bob =
      StationConfig::make(spec.optics_B, slits(spec.bob_x_centers_mm, spec.slit_x_mm),
                          slits(spec.bob_p_centers_mm, spec.slit_p_mm));

  // Starting point for Alice: the same x centers, and the mirrored momentum
  // centers rescaled to her Fourier mapping.
  std::array<double, 2> ax = spec.bob_x_centers_mm;
  std::array<double, 2> ap{};
  const double fourier_A = spec.optics_A.focal_length_mm / spec.optics_A.wavenumber_per_mm;
  for (int i = 0; i < 2; ++i) ap[i] = -spec.bob_p_centers_mm[i] * fourier_A / bob.fourier_scale();
  if (spec.alice_x_centers_mm) ax = *spec.alice_x_centers_mm;
  if (spec.alice_p_centers_mm) ap = *spec.alice_p_centers_mm;
  StationPair stations{
      StationConfig::make(spec.optics_A, slits(ax, spec.slit_x_mm), slits(ap, spec.slit_p_mm)),
      bob};

  const bool align = !spec.alice_x_centers_mm || !spec.alice_p_centers_mm;
  const auto build = [&](const StationPair& s) {
    if (spec.widths) {
      SourceWidths w = *spec.widths;
      if (w.sigma_plus == 0.0) w.sigma_plus = spec.calibration.pump.waist_mm;
      return build_source(w, spec.calibration.pump);
    }
    return calibrate_source(spec.calibration, s);
  };

  std::optional<SourceModel> source;
  const int passes = align ? std::max(spec.alignment_passes, 1) : 1;
  for (int pass = 0; pass < passes; ++pass) {
    source = build(stations);
    if (!align) break;
    StationPair moved = align_alice_detectors(*source, stations);
    // Keep explicitly configured centers.
    StationConfig alice = moved.alice;
    for (Basis b : kBases) {
      const bool fixed = b == Basis::x ? spec.alice_x_centers_mm.has_value()
                                       : spec.alice_p_centers_mm.has_value();
      if (fixed) alice = alice.with_detectors(b, stations.alice.detectors(b));
    }
    stations = StationPair{alice, bob};
  }
  if (align) source = build(stations);

  Experiment out{*source, stations, stations, std::nullopt};
  if (spec.equalize) {
    out.equalization = equalize_levels(*source, stations);
    out.stations = out.equalization->stations;
  }
  return out;
}

}  // namespace eprqkd
