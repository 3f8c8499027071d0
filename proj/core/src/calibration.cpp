#include "eprqkd/calibration.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "eprqkd/errors.hpp"
#include "quadrature.hpp"

namespace eprqkd {

namespace {

constexpr double kTinyWidth = 1e-9;

SourceModel trial_source(const CalibrationInputs& in, double tight_x, double tight_p) {
  return build_source({tight_x, in.pump.waist_mm, tight_p, in.kappa_plus}, in.pump,
                      BuildOptions{.enforce_positivity = false});
}

double solve_width(const CalibrationInputs& in, const StationPair& stations, Basis basis,
                   double target, double other_width) {
  const auto detected = [&](double width) {
    const SourceModel s = basis == Basis::x ? trial_source(in, width, other_width)
                                            : trial_source(in, other_width, width);
    return detected_variance(s, stations, basis, in.units);
  };
  const char* name = basis == Basis::x ? "x" : "p";

  const double floor = detected(kTinyWidth);
  if (!(target > floor)) {
    std::ostringstream os;
    os << "calibration infeasible in " << name << " basis: target " << target
       << " is below the slit-convolution floor " << floor;
    throw CalibrationError(os.str());
  }
  double hi = 1e-3;
  while (detected(hi) < target) {
    hi *= 2.0;
    if (hi > 1e6) {
      std::ostringstream os;
      os << "calibration infeasible in " << name << " basis: target " << target
         << " exceeds the largest reachable detected variance";
      throw CalibrationError(os.str());
    }
  }
  std::uintmax_t iterations = 200;
  const auto [lo_root, hi_root] = boost::math::tools::toms748_solve(
      [&](double w) { return detected(w) - target; }, kTinyWidth, hi,
      boost::math::tools::eps_tolerance<double>(48), iterations);
  return 0.5 * (lo_root + hi_root);
}

}  // namespace

DetectedProfile detected_profile(const SourceModel& source, const StationPair& stations,
                                 Basis basis, int det_A, const ReadoutUnits& units) {
  const auto& slit = stations.alice.detector(basis, det_A);
  double lo = stations.alice.to_crystal(basis, slit.lower());
  double hi = stations.alice.to_crystal(basis, slit.upper());
  if (lo > hi) std::swap(lo, hi);

  const double slope = source.conditional_slope(basis);
  const double cond_var = std::pow(source.conditional_std(basis), 2);
  const auto density = [&](double u) { return marginal_density(source, basis, u); };

  const double mass = detail::integrate(density, lo, hi).value;
  if (!(mass > 0.0)) throw ValidationError("Alice's slit has zero acceptance");
  const double m1 = detail::integrate([&](double u) { return density(u) * slope * u; }, lo, hi).value;
  const double m2 = detail::integrate(
      [&](double u) { return density(u) * (cond_var + slope * slope * u * u); }, lo, hi).value;

  const double mean_crystal = m1 / mass;
  const double var_crystal = m2 / mass - mean_crystal * mean_crystal;
  const double bob_scale = stations.bob.to_detector(basis, 1.0);
  const double bob_width = stations.bob.detector(basis, det_A).width_mm;

  DetectedProfile out;
  out.mean_mm = mean_crystal * bob_scale;
  out.variance_mm2 = var_crystal * bob_scale * bob_scale + bob_width * bob_width / 12.0;
  out.reported = out.variance_mm2 * std::pow(units.scale(basis), 2);
  return out;
}

double detected_variance(const SourceModel& source, const StationPair& stations, Basis basis,
                         const ReadoutUnits& units) {
  return 0.5 * (detected_profile(source, stations, basis, 0, units).reported +
                detected_profile(source, stations, basis, 1, units).reported);
}

double slit_floor(const StationPair& stations, Basis basis, const CalibrationInputs& inputs) {
  const SourceModel s = basis == Basis::x ? trial_source(inputs, kTinyWidth, 1.0)
                                          : trial_source(inputs, 1.0, kTinyWidth);
  return detected_variance(s, stations, basis, inputs.units);
}

SourceModel calibrate_source(const CalibrationInputs& in, const StationPair& stations) {
  if (!(in.targets.var_x > 0.0 && in.targets.var_p > 0.0)) {
    throw ValidationError("calibration targets must be positive");
  }
  if (!(in.kappa_plus > 0.0) || !(in.pump.waist_mm > 0.0)) {
    throw ValidationError("kappa_plus and pump waist must be positive");
  }
  // Position and momentum quadratures are independent, so each basis only
  // sees its own width; the other argument is a placeholder.
  const double sigma_minus = solve_width(in, stations, Basis::x, in.targets.var_x, 1.0);
  const double kappa_minus = solve_width(in, stations, Basis::p, in.targets.var_p, 1.0);
  try {
    return build_source({sigma_minus, in.pump.waist_mm, kappa_minus, in.kappa_plus}, in.pump);
  } catch (const ValidationError& e) {
    throw CalibrationError(std::string("calibrated source is unphysical: ") + e.what());
  }
}

}  // namespace eprqkd
