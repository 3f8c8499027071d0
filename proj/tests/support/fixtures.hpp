#pragma once

#include "eprqkd/experiment.hpp"

namespace eprqkd::testing {

/// Default calibrated, aligned and equalized apparatus. Built once.
inline const Experiment& default_experiment() {
  static const Experiment e = make_experiment(ExperimentSpec{});
  return e;
}

inline DetectorPair slit_pair(double c1, double c2, double width, double t1 = 1.0, double t2 = 1.0) {
  return {SlitDetector{c1, width, t1}, SlitDetector{c2, width, t2}};
}

/// Stations with the default optics and the given centers, no filters.
inline StationPair simple_stations(std::array<double, 2> ax, std::array<double, 2> ap,
                                   std::array<double, 2> bx, std::array<double, 2> bp) {
  return StationPair{
      StationConfig::make({}, slit_pair(ax[0], ax[1], 0.2), slit_pair(ap[0], ap[1], 0.5)),
      StationConfig::make({}, slit_pair(bx[0], bx[1], 0.2), slit_pair(bp[0], bp[1], 0.5))};
}

}  // namespace eprqkd::testing
