#pragma once

// Independent reference computations for the tests. Written directly from the
// Gaussian model with plain loops and std::erfc, sharing no code with the
// library's quadrature.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "eprqkd/detection.hpp"
#include "eprqkd/qber.hpp"
#include "eprqkd/source_model.hpp"

namespace eprqkd::testing {

inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Covariance of (q_A, q_B) for one basis, from the collective widths:
/// Var(q) = (tight^2 + broad^2) / 4, Cov = +-(broad^2 - tight^2) / 4.
struct Bivariate {
  double var = 0.0;
  double cov = 0.0;
};

inline Bivariate bivariate(const SourceWidths& w, Basis basis) {
  if (basis == Basis::x) {
    return {(w.sigma_minus * w.sigma_minus + w.sigma_plus * w.sigma_plus) / 4.0,
            (w.sigma_plus * w.sigma_plus - w.sigma_minus * w.sigma_minus) / 4.0};
  }
  return {(w.kappa_minus * w.kappa_minus + w.kappa_plus * w.kappa_plus) / 4.0,
          (w.kappa_minus * w.kappa_minus - w.kappa_plus * w.kappa_plus) / 4.0};
}

/// P(q_A in [a1, a2], q_B in [b1, b2]) for a zero-mean bivariate normal with
/// the given covariance. Composite Simpson over q_A of the exact conditional
/// mass of q_B.
inline double rectangle_probability(double var_a, double var_b, double cov, double a1, double a2,
                                    double b1, double b2, int panels = 4000) {
  const double sa = std::sqrt(var_a);
  const double slope = cov / var_a;
  const double cond = std::sqrt(std::max(var_b - cov * cov / var_a, 0.0));
  const auto f = [&](double u) {
    const double density = std::exp(-0.5 * u * u / var_a) / (sa * std::sqrt(2.0 * std::numbers::pi));
    const double m = slope * u;
    const double mass = cond > 0.0 ? std_normal_cdf((b2 - m) / cond) - std_normal_cdf((b1 - m) / cond)
                                   : (m >= b1 && m <= b2 ? 1.0 : 0.0);
    return density * mass;
  };
  const double h = (a2 - a1) / panels;
  double s = f(a1) + f(a2);
  for (int i = 1; i < panels; ++i) s += f(a1 + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Coincidence probability for one detector pair, transmissions included.
inline double coincidence_oracle(const SourceModel& source, const StationPair& stations,
                                 Basis ba, Basis bb, int da, int db) {
  const auto window = [](const StationConfig& st, Basis b, int d) {
    const auto& slit = st.detector(b, d);
    double lo = st.to_crystal(b, slit.lower());
    double hi = st.to_crystal(b, slit.upper());
    if (lo > hi) std::swap(lo, hi);
    return std::array<double, 2>{lo, hi};
  };
  const auto wa = window(stations.alice, ba, da);
  const auto wb = window(stations.bob, bb, db);
  const Bivariate va = bivariate(source.widths(), ba);
  const Bivariate vb = bivariate(source.widths(), bb);
  const double cov = ba == bb ? va.cov : 0.0;
  const double t = stations.alice.detector(ba, da).transmission *
                   stations.bob.detector(bb, db).transmission;
  return t * rectangle_probability(va.var, vb.var, cov, wa[0], wa[1], wb[0], wb[1]);
}

/// CoincidenceTable from Bob-row constants.
template <typename Rows>
CoincidenceTable table_from_bob_rows(const Rows& rows) {
  CoincidenceTable t;
  for (int b = 0; b < 4; ++b)
    for (int a = 0; a < 4; ++a) t.at(a, b) = rows[b][a];
  return t;
}

/// Binomial standard deviation of a count.
inline double binomial_sigma(double n, double p) { return std::sqrt(n * p * (1.0 - p)); }

}  // namespace eprqkd::testing
