#include "eprqkd/source_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "eprqkd/errors.hpp"

namespace eprqkd {

namespace {

double gauss(double u, double sd) {
  const double z = u / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

// (difference-mode std, sum-mode std) for a basis. For x the difference
// x_A - x_B is the tight mode; for p it is the sum p_A + p_B.
struct ModeWidths {
  double tight;
  double broad;
};

ModeWidths modes(const SourceWidths& w, Basis basis) {
  if (basis == Basis::x) return {w.sigma_minus, w.sigma_plus};
  return {w.kappa_minus, w.kappa_plus};
}

}  // namespace

double SourceModel::epr_product() const {
  return widths_.sigma_minus * widths_.sigma_minus * widths_.kappa_minus * widths_.kappa_minus;
}

double SourceModel::marginal_std(Basis basis) const {
  const auto [t, b] = modes(widths_, basis);
  return 0.5 * std::sqrt(t * t + b * b);
}

double SourceModel::conditional_std(Basis basis) const {
  const auto [t, b] = modes(widths_, basis);
  const double s2 = t * t + b * b;
  if (s2 == 0.0) return 0.0;
  return t * b / std::sqrt(s2);
}

double SourceModel::conditional_slope(Basis basis) const {
  const auto [t, b] = modes(widths_, basis);
  const double s2 = t * t + b * b;
  // x: q_B tracks q_A (difference is tight); p: q_B tracks -q_A (sum is tight).
  const double r = (b * b - t * t) / s2;
  return basis == Basis::x ? r : -r;
}

SourceModel build_source(const SourceWidths& w, const PumpProfile& pump, BuildOptions options) {
  const auto check = [&](double v, const char* name) {
    const bool bad = options.enforce_positivity ? !(v > 0.0) : !(v >= 0.0);
    if (bad || !std::isfinite(v)) {
      std::ostringstream os;
      os << "source width " << name << " = " << v << " must be "
         << (options.enforce_positivity ? "positive" : "non-negative");
      throw ValidationError(os.str());
    }
  };
  check(w.sigma_minus, "sigma_minus");
  check(w.sigma_plus, "sigma_plus");
  check(w.kappa_minus, "kappa_minus");
  check(w.kappa_plus, "kappa_plus");
  if (!(pump.waist_mm > 0.0)) throw ValidationError("pump waist must be positive");

  if (options.enforce_positivity) {
    const double diff_mode = w.sigma_minus * w.sigma_minus * w.kappa_plus * w.kappa_plus;
    const double sum_mode = w.sigma_plus * w.sigma_plus * w.kappa_minus * w.kappa_minus;
    if (diff_mode < 1.0) {
      std::ostringstream os;
      os << "unphysical source: sigma_minus^2 * kappa_plus^2 = " << diff_mode << " < 1";
      throw ValidationError(os.str());
    }
    if (sum_mode < 1.0) {
      std::ostringstream os;
      os << "unphysical source: sigma_plus^2 * kappa_minus^2 = " << sum_mode << " < 1";
      throw ValidationError(os.str());
    }
  }
  return SourceModel(w, pump);
}

PairSample sample_pair(const SourceModel& source, RandomStream& rng) {
  const auto& w = source.widths();
  const double x_diff = w.sigma_minus * rng.normal();
  const double x_sum = w.sigma_plus * rng.normal();
  const double p_sum = w.kappa_minus * rng.normal();
  const double p_diff = w.kappa_plus * rng.normal();
  return PairSample{0.5 * (x_sum + x_diff), 0.5 * (x_sum - x_diff), 0.5 * (p_sum + p_diff),
                    0.5 * (p_sum - p_diff)};
}

QuadraturePair sample_quadratures(const SourceModel& source, Basis basis_A, Basis basis_B,
                                  RandomStream& rng) {
  if (basis_A != basis_B) {
    const double a = source.marginal_std(basis_A) * rng.normal();
    const double b = source.marginal_std(basis_B) * rng.normal();
    return {a, b};
  }
  const auto [t, br] = modes(source.widths(), basis_A);
  const double tight = t * rng.normal();
  const double broad = br * rng.normal();
  if (basis_A == Basis::x) return {0.5 * (broad + tight), 0.5 * (broad - tight)};
  return {0.5 * (tight + broad), 0.5 * (tight - broad)};
}

double marginal_density(const SourceModel& source, Basis basis, double u) {
  return gauss(u, source.marginal_std(basis));
}

double joint_density(const SourceModel& source, Basis basis_A, Basis basis_B, double u_A,
                     double u_B) {
  if (basis_A != basis_B) {
    return marginal_density(source, basis_A, u_A) * marginal_density(source, basis_B, u_B);
  }
  const auto [t, b] = modes(source.widths(), basis_A);
  // Change of variables to (tight, broad) modes has Jacobian 2.
  if (basis_A == Basis::x) return 2.0 * gauss(u_A - u_B, t) * gauss(u_A + u_B, b);
  return 2.0 * gauss(u_A + u_B, t) * gauss(u_A - u_B, b);
}

}  // namespace eprqkd
