#pragma once

#include "eprqkd/basis.hpp"
#include "eprqkd/random.hpp"

namespace eprqkd {

/// Gaussian pump field at the crystal face. Lengths in mm.
struct PumpProfile {
  double waist_mm = 2.0;
};

/// Standard deviations of the four collective quadratures of the pair.
/// Units: positions in mm, momenta in hbar/mm with hbar = 1.
struct SourceWidths {
  double sigma_minus = 0.0;  ///< std of x_A - x_B
  double sigma_plus = 0.0;   ///< std of x_A + x_B
  double kappa_minus = 0.0;  ///< std of p_A + p_B
  double kappa_plus = 0.0;   ///< std of p_A - p_B
};

struct BuildOptions {
  /// Disabling allows zero widths and unphysical (non-positive Wigner) states.
  /// Only meant for limit tests.
  bool enforce_positivity = true;
};

/// Zero-mean Gaussian two-photon transverse state, one transverse dimension.
/// Position and momentum quadratures are uncorrelated with each other.
class SourceModel {
 public:
  const SourceWidths& widths() const { return widths_; }
  const PumpProfile& pump() const { return pump_; }

  double sigma_minus() const { return widths_.sigma_minus; }
  double sigma_plus() const { return widths_.sigma_plus; }
  double kappa_minus() const { return widths_.kappa_minus; }
  double kappa_plus() const { return widths_.kappa_plus; }

  /// sigma_minus^2 * kappa_minus^2, the latent EPR variance product (hbar^2).
  double epr_product() const;
  /// EPR product below the separable bound 1/4.
  bool entangled() const { return epr_product() < 0.25; }

  /// Std of one party's quadrature in `basis` (crystal-plane units).
  double marginal_std(Basis basis) const;
  /// Std of party B's quadrature given party A's (and vice versa; symmetric).
  double conditional_std(Basis basis) const;
  /// Regression slope E[q_B | q_A] / q_A. Close to +1 for x, -1 for p.
  double conditional_slope(Basis basis) const;

 private:
  friend SourceModel build_source(const SourceWidths&, const PumpProfile&, BuildOptions);
  SourceModel(const SourceWidths& w, const PumpProfile& pump) : widths_(w), pump_(pump) {}

  SourceWidths widths_;
  PumpProfile pump_;
};

/// Validates widths and the Gaussian positivity constraints
/// sigma_minus*kappa_plus >= 1 and sigma_plus*kappa_minus >= 1.
/// Throws ValidationError on a violation.
SourceModel build_source(const SourceWidths& widths, const PumpProfile& pump,
                         BuildOptions options = {});

/// Latent crystal-plane quadratures of one emitted pair.
struct PairSample {
  double x_A = 0.0;
  double x_B = 0.0;
  double p_A = 0.0;
  double p_B = 0.0;

  double quadrature(Basis basis, Side side) const {
    if (basis == Basis::x) return side == Side::A ? x_A : x_B;
    return side == Side::A ? p_A : p_B;
  }
};

PairSample sample_pair(const SourceModel& source, RandomStream& rng);

/// Draws only the two quadratures a (basis_A, basis_B) measurement reads.
/// Same distribution as the corresponding components of sample_pair.
struct QuadraturePair {
  double a = 0.0;
  double b = 0.0;
};
QuadraturePair sample_quadratures(const SourceModel& source, Basis basis_A, Basis basis_B,
                                  RandomStream& rng);

/// Joint density of (q_A, q_B) in crystal-plane coordinates for the given
/// basis pair. Mixed bases factorize into the two marginals.
double joint_density(const SourceModel& source, Basis basis_A, Basis basis_B, double u_A,
                     double u_B);

double marginal_density(const SourceModel& source, Basis basis, double u);

}  // namespace eprqkd
