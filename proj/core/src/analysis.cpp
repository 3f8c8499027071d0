#include "eprqkd/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "eprqkd/errors.hpp"
#include "quadrature.hpp"

namespace eprqkd {

void ScanData::validate() const {
  if (positions_mm.size() != counts.size()) {
    std::ostringstream os;
    os << "scan: " << positions_mm.size() << " positions but " << counts.size() << " counts";
    throw ValidationError(os.str());
  }
}

// ---------------------------------------------------------------------------
// Separability check

EprCheckResult duan_check(std::vector<VarianceMeasurement> var_x,
                          std::vector<VarianceMeasurement> var_p) {
  if (var_x.empty() || var_p.empty()) {
    throw ValidationError("EPR check needs at least one position and one momentum variance");
  }
  for (const auto* list : {&var_x, &var_p}) {
    for (const auto& m : *list) {
      if (!(m.value > 0.0)) throw ValidationError("EPR check: variance '" + m.label + "' is not positive");
      if (!(m.uncertainty >= 0.0)) {
        throw ValidationError("EPR check: uncertainty of '" + m.label + "' is negative");
      }
    }
  }
  const auto mean_and_error = [](const std::vector<VarianceMeasurement>& list) {
    double sum = 0.0, var = 0.0;
    for (const auto& m : list) {
      sum += m.value;
      var += m.uncertainty * m.uncertainty;
    }
    const double n = static_cast<double>(list.size());
    return std::pair{sum / n, std::sqrt(var) / n};
  };
  const auto [mx, ux] = mean_and_error(var_x);
  const auto [mp, up] = mean_and_error(var_p);

  EprCheckResult r;
  r.var_x_minus = std::move(var_x);
  r.var_p_plus = std::move(var_p);
  r.mean_x = mx;
  r.mean_p = mp;
  r.product = mx * mp;
  r.product_uncertainty = std::hypot(mp * ux, mx * up);
  r.satisfied = r.product < r.bound;
  const double gap = r.bound - r.product;
  if (r.product_uncertainty > 0.0) {
    r.sigma_distance = gap / r.product_uncertainty;
  } else {
    r.sigma_distance = gap == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), gap);
  }
  return r;
}

EprCheckResult duan_check(std::span<const double> var_x, std::span<const double> var_p) {
  const auto wrap = [](std::span<const double> values, const char* prefix) {
    std::vector<VarianceMeasurement> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
      out.push_back({std::string(prefix) + std::to_string(i + 1), values[i], 0.0, {}, {}});
    }
    return out;
  };
  return duan_check(wrap(var_x, "x"), wrap(var_p, "p"));
}

std::vector<double> poisson_errors(std::span<const std::uint64_t> counts) {
  std::vector<double> out(counts.size());
  std::transform(counts.begin(), counts.end(), out.begin(), [](std::uint64_t n) {
    return std::sqrt(static_cast<double>(std::max<std::uint64_t>(n, 1)));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Scans

std::vector<double> ScanGrid::points() const {
  if (!(step > 0.0)) throw ValidationError("scan grid: step must be positive");
  if (!(stop > start)) throw ValidationError("scan grid: stop must exceed start");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

ScanGrid ScanGrid::parse(std::string_view text) {
  std::array<double, 3> v{};
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    const auto colon = text.find(':', pos);
    if ((k < 2) == (colon == std::string_view::npos)) {
      throw ValidationError("scan grid must be start:stop:step, got '" + std::string(text) + "'");
    }
    const auto field = text.substr(pos, colon == std::string_view::npos ? text.size() - pos
                                                                         : colon - pos);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v[k]);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      throw ValidationError("scan grid: bad number '" + std::string(field) + "'");
    }
    pos = colon + 1;
  }
  ScanGrid g{v[0], v[1], v[2]};
  g.points();
  return g;
}

ScanData scan_simulation(const SourceModel& source, const StationPair& stations,
                         const DetectorLabel& fixed_detector, Basis basis_B,
                         std::span<const double> positions, std::uint64_t pairs_per_point,
                         std::uint64_t seed) {
  if (fixed_detector.side != Side::A) {
    throw ValidationError("scan: the fixed detector must be one of Alice's");
  }
  if (positions.empty()) throw ValidationError("scan: empty grid");
  for (std::size_t i = 1; i < positions.size(); ++i) {
    if (!(positions[i] > positions[i - 1])) {
      throw ValidationError("scan: grid positions must be strictly increasing");
    }
  }

  const Basis basis_A = fixed_detector.basis;
  const SlitDetector& slit_A = stations.alice.detector(basis_A, fixed_detector.index);
  const double a1 = stations.alice.to_crystal(basis_A, slit_A.lower());
  const double a2 = stations.alice.to_crystal(basis_A, slit_A.upper());
  const double lo = std::min(a1, a2), hi = std::max(a1, a2);

  const double sd_A = source.marginal_std(basis_A);
  const double mass_A = detail::normal_interval_mass(0.0, sd_A, lo, hi);
  const boost::math::normal_distribution<double> unit;
  const double cdf_lo = boost::math::cdf(unit, lo / sd_A);
  const double cdf_hi = boost::math::cdf(unit, hi / sd_A);

  const bool same = basis_A == basis_B;
  const double slope = same ? source.conditional_slope(basis_A) : 0.0;
  const double spread = same ? source.conditional_std(basis_A) : source.marginal_std(basis_B);
  const double half_width = 0.5 * stations.bob.detector(basis_B, 0).width_mm;

  ScanData scan;
  scan.fixed_detector = fixed_detector;
  scan.basis_B = basis_B;
  scan.positions_mm.assign(positions.begin(), positions.end());
  scan.counts.resize(positions.size());

  // Pairs that miss Alice's slit can never count, so only her hits are drawn
  // individually: their number is binomial and their coordinate is the
  // marginal truncated to the slit. The counts have the same law as a
  // pair-by-pair simulation.
  for (std::size_t k = 0; k < positions.size(); ++k) {
    RandomStream rng(seed, k);
    std::binomial_distribution<std::uint64_t> hits_A(pairs_per_point, mass_A);
    const std::uint64_t n_A = hits_A(rng.engine());
    const double window_lo = positions[k] - half_width;
    const double window_hi = positions[k] + half_width;
    std::uint64_t count = 0;
    for (std::uint64_t i = 0; i < n_A; ++i) {
      const double u = cdf_lo + rng.uniform() * (cdf_hi - cdf_lo);
      const double q_A = sd_A * boost::math::quantile(unit, std::clamp(u, 1e-300, 1.0 - 1e-16));
      const double q_B = slope * q_A + spread * rng.normal();
      const double coordinate = stations.bob.to_detector(basis_B, q_B);
      count += coordinate >= window_lo && coordinate <= window_hi;
    }
    scan.counts[k] = count;
  }
  return scan;
}

double max_min_ratio(std::span<const std::uint64_t> counts) {
  if (counts.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  return static_cast<double>(*hi) / static_cast<double>(std::max<std::uint64_t>(*lo, 1));
}

double max_min_ratio(std::span<const double> values) {
  if (values.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi / std::max(*lo, 1.0);
}

bool is_flat(const ScanData& scan, double ratio) { return max_min_ratio(scan.counts) < ratio; }

ReferenceVariances reference_variances() {
  ReferenceVariances r;
  r.x.push_back({"Ax1-Bx1", 0.152, 0.003, {}, {}});
  r.x.push_back({"Ax2-Bx2", 0.080, 0.002, {}, {}});
  r.p.push_back({"Ap1+Bp1", 0.912, 0.017, {}, {}});
  r.p.push_back({"Ap2+Bp2", 0.875, 0.090, 0.90,
                 "printed as 0.875 +- 0.90 under the label Ap1+Bp1; read as the second "
                 "momentum pairing with uncertainty 0.090"});
  return r;
}

}  // namespace eprqkd
