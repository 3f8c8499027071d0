#pragma once

#include <functional>
#include <vector>

namespace eprqkd::detail {

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (15-point) on [lo, hi], split at every breakpoint
/// that falls strictly inside the interval. `tolerance` is relative to the
/// panel integral.
Integral integrate(const std::function<double(double)>& f, double lo, double hi,
                   std::vector<double> breakpoints = {}, double tolerance = 1e-10);

/// P(lo <= X <= hi) for X ~ N(mean, sd). sd == 0 is a point mass.
double normal_interval_mass(double mean, double sd, double lo, double hi);

}  // namespace eprqkd::detail
