#include "quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace eprqkd::detail {

Integral integrate(const std::function<double(double)>& f, double lo, double hi,
                   std::vector<double> breakpoints, double tolerance) {
  Integral out;
  if (!(hi > lo)) return out;
  std::vector<double> cuts{lo};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double b : breakpoints) {
    if (b > cuts.back() && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0;
    out.value += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, cuts[i], cuts[i + 1], 15, tolerance, &err);
    // |Kronrod - Gauss| summed over leaf panels; conservative.
    out.error += std::abs(err);
  }
  return out;
}

double normal_interval_mass(double mean, double sd, double lo, double hi) {
  if (sd == 0.0) return (mean >= lo && mean <= hi) ? 1.0 : 0.0;
  const double k = 1.0 / (sd * std::sqrt(2.0));
  const double a = (lo - mean) * k;
  const double b = (hi - mean) * k;
  // Pick the tail that avoids cancellation.
  if (a > 0.0) return 0.5 * (std::erfc(a) - std::erfc(b));
  if (b < 0.0) return 0.5 * (std::erfc(-b) - std::erfc(-a));
  return 0.5 * (std::erf(b) - std::erf(a));
}

}  // namespace eprqkd::detail
