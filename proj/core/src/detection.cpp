#include "eprqkd/detection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "eprqkd/errors.hpp"
#include "quadrature.hpp"

namespace eprqkd {

namespace {

void validate_pair(const DetectorPair& d, Basis basis) {
  for (int i = 0; i < 2; ++i) {
    if (!(d[i].width_mm > 0.0) || !std::isfinite(d[i].center_mm)) {
      std::ostringstream os;
      os << to_string(basis) << " detector " << i + 1 << ": width must be positive";
      throw ValidationError(os.str());
    }
    if (!(d[i].transmission > 0.0 && d[i].transmission <= 1.0)) {
      std::ostringstream os;
      os << to_string(basis) << " detector " << i + 1 << ": transmission "
         << d[i].transmission << " outside (0, 1]";
      throw ValidationError(os.str());
    }
  }
  const bool disjoint = d[0].upper() < d[1].lower() || d[1].upper() < d[0].lower();
  if (!disjoint) {
    throw ValidationError(std::string("overlapping slits in ") + std::string(to_string(basis)) +
                          " basis");
  }
}

struct Interval {
  double lo;
  double hi;
};

Interval crystal_window(const StationConfig& station, Basis basis, int det) {
  const auto& d = station.detector(basis, det);
  const double a = station.to_crystal(basis, d.lower());
  const double b = station.to_crystal(basis, d.upper());
  return {std::min(a, b), std::max(a, b)};
}

void require_positive_widths(const SourceModel& source) {
  const auto& w = source.widths();
  if (!(w.sigma_minus > 0 && w.sigma_plus > 0 && w.kappa_minus > 0 && w.kappa_plus > 0)) {
    throw ValidationError("coincidence quadrature needs strictly positive source widths");
  }
}

QuadratureResult geometric_probability(const SourceModel& source, const StationPair& stations,
                                       Basis basis_A, Basis basis_B, int det_A, int det_B) {
  require_positive_widths(source);
  const Interval ia = crystal_window(stations.alice, basis_A, det_A);
  const Interval ib = crystal_window(stations.bob, basis_B, det_B);

  const bool same = basis_A == basis_B;
  const double slope = same ? source.conditional_slope(basis_A) : 0.0;
  const double cond_sd = same ? source.conditional_std(basis_A) : source.marginal_std(basis_B);

  double worst_inner = 0.0;
  const auto inner = [&](double u) {
    const double mean = slope * u;
    const auto f = [&](double v) { return joint_density(source, basis_A, basis_B, u, v); };
    const auto r = detail::integrate(
        f, ib.lo, ib.hi, {mean - 6.0 * cond_sd, mean, mean + 6.0 * cond_sd});
    worst_inner = std::max(worst_inner, r.error);
    return r.value;
  };

  std::vector<double> outer_cuts;
  if (same && slope != 0.0) {
    for (double edge : {ib.lo, ib.hi}) {
      const double u = edge / slope;
      const double spread = 6.0 * cond_sd / std::abs(slope);
      outer_cuts.insert(outer_cuts.end(), {u - spread, u, u + spread});
    }
  }
  const auto outer = detail::integrate(inner, ia.lo, ia.hi, outer_cuts);
  return {outer.value, outer.error + worst_inner * (ia.hi - ia.lo)};
}

}  // namespace

StationConfig StationConfig::make(const StationOptics& optics, const DetectorPair& x_detectors,
                                  const DetectorPair& p_detectors) {
  if (!(optics.object_distance_mm > 0 && optics.image_distance_mm > 0 &&
        optics.focal_length_mm > 0 && optics.wavenumber_per_mm > 0)) {
    throw ValidationError("station optics: distances, focal length and wavenumber must be positive");
  }
  validate_pair(x_detectors, Basis::x);
  validate_pair(p_detectors, Basis::p);
  StationConfig s;
  s.optics_ = optics;
  s.x_detectors_ = x_detectors;
  s.p_detectors_ = p_detectors;
  return s;
}

double StationConfig::to_detector(Basis basis, double crystal) const {
  return basis == Basis::x ? crystal / magnification_parameter() : crystal * fourier_scale();
}

double StationConfig::to_crystal(Basis basis, double detector) const {
  return basis == Basis::x ? detector * magnification_parameter() : detector / fourier_scale();
}

StationConfig StationConfig::with_detectors(Basis basis, const DetectorPair& detectors) const {
  return basis == Basis::x ? make(optics_, detectors, p_detectors_)
                           : make(optics_, x_detectors_, detectors);
}

StationConfig StationConfig::without_filters() const {
  StationConfig s = *this;
  for (auto* pair : {&s.x_detectors_, &s.p_detectors_}) {
    for (auto& d : *pair) d.transmission = 1.0;
  }
  return s;
}

double readout_coordinate(const PairSample& sample, const StationConfig& station, Basis basis,
                          Side side) {
  return station.to_detector(basis, sample.quadrature(basis, side));
}

ClickOutcome click(double coordinate, const DetectorPair& detectors) {
  if (detectors[0].contains(coordinate)) return ClickOutcome::Detector1;
  if (detectors[1].contains(coordinate)) return ClickOutcome::Detector2;
  return ClickOutcome::Null;
}

ClickOutcome detect(double coordinate, const DetectorPair& detectors, RandomStream& rng) {
  const ClickOutcome c = click(coordinate, detectors);
  if (c == ClickOutcome::Null) return c;
  const double t = detectors[logical_bit(c)].transmission;
  if (t < 1.0 && !rng.bernoulli(t)) return ClickOutcome::Null;
  return c;
}

QuadratureResult coincidence_probability(const SourceModel& source, const StationPair& stations,
                                         Basis basis_A, Basis basis_B, int det_A, int det_B) {
  auto r = geometric_probability(source, stations, basis_A, basis_B, det_A, det_B);
  const double t = stations.alice.detector(basis_A, det_A).transmission *
                   stations.bob.detector(basis_B, det_B).transmission;
  r.value *= t;
  r.error_bound *= t;
  if (!(r.error_bound <= kCoincidenceTolerance)) {
    std::ostringstream os;
    os << "coincidence quadrature did not converge: error bound " << r.error_bound;
    throw ConvergenceError(os.str(), r.error_bound);
  }
  return r;
}

double single_click_probability(const SourceModel& source, const StationConfig& station,
                                Basis basis, int det) {
  const Interval w = crystal_window(station, basis, det);
  return detail::normal_interval_mass(0.0, source.marginal_std(basis), w.lo, w.hi) *
         station.detector(basis, det).transmission;
}

std::array<std::array<double, 4>, 4> coincidence_matrix(const SourceModel& source,
                                                        const StationPair& stations) {
  std::array<std::array<double, 4>, 4> m{};
  for (int a = 0; a < 4; ++a) {
    const auto la = DetectorLabel::from_channel(Side::A, a);
    for (int b = 0; b < 4; ++b) {
      const auto lb = DetectorLabel::from_channel(Side::B, b);
      m[a][b] = coincidence_probability(source, stations, la.basis, lb.basis, la.index, lb.index)
                    .value;
    }
  }
  return m;
}

std::array<double, 4> equalization_factors(const std::array<double, 4>& diagonal) {
  for (double d : diagonal) {
    if (!(d > 0.0)) throw ValidationError("cannot equalize: zero diagonal coincidence level");
  }
  const double lowest = *std::min_element(diagonal.begin(), diagonal.end());
  std::array<double, 4> f{};
  for (int i = 0; i < 4; ++i) f[i] = lowest / diagonal[i];
  return f;
}

LevelEqualization equalize_levels(const SourceModel& source, const StationPair& stations) {
  std::array<double, 4> diagonal{};
  for (int c = 0; c < 4; ++c) {
    const auto l = DetectorLabel::from_channel(Side::A, c);
    diagonal[c] = coincidence_probability(source, stations, l.basis, l.basis, l.index, l.index).value;
  }
  const auto cell = equalization_factors(diagonal);
  std::array<double, 4> split_factors{};

  DetectorPair ax = stations.alice.detectors(Basis::x), ap = stations.alice.detectors(Basis::p);
  DetectorPair bx = stations.bob.detectors(Basis::x), bp = stations.bob.detectors(Basis::p);
  for (int c = 0; c < 4; ++c) {
    const double split = std::sqrt(cell[c]);
    split_factors[c] = split;
    auto& a = c < 2 ? ax[c % 2] : ap[c % 2];
    auto& b = c < 2 ? bx[c % 2] : bp[c % 2];
    a.transmission *= split;
    b.transmission *= split;
  }
  return LevelEqualization{cell, split_factors, split_factors,
                           StationPair{StationConfig::make(stations.alice.optics(), ax, ap),
                                       StationConfig::make(stations.bob.optics(), bx, bp)}};
}

StationPair align_alice_detectors(const SourceModel& source, const StationPair& stations) {
  // geometric_probability ignores transmissions, so filters can stay in place.
  const StationPair& geometry = stations;
  StationConfig alice = stations.alice;

  for (Basis basis : kBases) {
    DetectorPair moved = alice.detectors(basis);
    for (int i = 0; i < 2; ++i) {
      const double bob_center = stations.bob.detector(basis, i).center_mm;
      const double guess = stations.alice.to_detector(
          basis, source.conditional_slope(basis) * stations.bob.to_crystal(basis, bob_center));
      const double cond_detector =
          std::abs(stations.alice.to_detector(basis, source.conditional_std(basis)));
      const double half_range = std::max(0.5, 4.0 * cond_detector);

      const auto negative_rate = [&](double center) {
        DetectorPair trial = moved;
        trial[i].center_mm = center;
        // A trial that overlaps its sibling is simply scored as useless.
        if (!(trial[0].upper() < trial[1].lower() || trial[1].upper() < trial[0].lower())) {
          return 0.0;
        }
        StationPair probe{geometry.alice.with_detectors(basis, trial), geometry.bob};
        return -geometric_probability(source, probe, basis, basis, i, i).value;
      };
      const auto best = boost::math::tools::brent_find_minima(
          negative_rate, guess - half_range, guess + half_range, 40);
      moved[i].center_mm = best.first;
    }
    alice = alice.with_detectors(basis, moved);
  }
  return StationPair{alice, stations.bob};
}

}  // namespace eprqkd
