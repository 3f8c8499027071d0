#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "eprqkd/basis.hpp"

namespace eprqkd {

/// 4x4 coincidence counts, [Alice channel][Bob channel], channels ordered
/// {x1, x2, p1, p2}.
class CoincidenceTable {
 public:
  using Counts = std::array<std::array<std::uint64_t, 4>, 4>;

  CoincidenceTable() = default;
  explicit CoincidenceTable(const Counts& counts) : counts_(counts) {}

  std::uint64_t at(int alice_channel, int bob_channel) const {
    return counts_[alice_channel][bob_channel];
  }
  std::uint64_t& at(int alice_channel, int bob_channel) {
    return counts_[alice_channel][bob_channel];
  }
  std::uint64_t at(const DetectorLabel& alice, const DetectorLabel& bob) const {
    return at(alice.channel(), bob.channel());
  }
  void add(Basis basis_A, int det_A, Basis basis_B, int det_B, std::uint64_t n = 1) {
    counts_[static_cast<int>(basis_A) * 2 + det_A][static_cast<int>(basis_B) * 2 + det_B] += n;
  }

  /// Sum of the 2x2 block where Alice measured basis_A and Bob basis_B.
  std::uint64_t block_total(Basis basis_A, Basis basis_B) const;
  /// Off-diagonal ("wrong") counts of a same-basis block.
  std::uint64_t wrong(Basis basis) const;
  std::uint64_t right(Basis basis) const;
  std::uint64_t total() const;
  std::uint64_t alice_tally(int channel) const;
  std::uint64_t bob_tally(int channel) const;

  const Counts& counts() const { return counts_; }

  friend bool operator==(const CoincidenceTable&, const CoincidenceTable&) = default;

 private:
  Counts counts_{};
};

struct QberReport {
  double p_wrong = 0.0;
  double p_right = 0.0;
  double qber = 0.0;
  std::optional<double> qber_xx;
  std::optional<double> qber_pp;
  std::optional<double> chi;  ///< set only for eavesdropper predictions
  double denominator = 0.0;
  double uncertainty = 0.0;   ///< binomial, sqrt(q (1 - q) / denominator)
};

/// No-eavesdropper QBER: wrong same-basis counts over all same-basis counts.
/// Throws ValidationError if there are no same-basis counts.
QberReport qber_from_counts(const CoincidenceTable& table);

/// How Bob's detectors answer a photon Eve re-prepared.
struct ResendProbabilities {
  /// Bob measures in Eve's basis: probability he lands on Eve's detector.
  double same_basis_correct = 1.0;
  /// Bob measures in the other basis: probability of detector 1 and 2.
  /// Whatever is left of 1 is a miss at Bob.
  std::array<double, 2> cross_basis{0.5, 0.5};

  /// p_j(B j_t; k) for Bob's basis j, Bob's detector t, Eve's basis k.
  /// For j == k the detector is the one Eve prepared, so t is ignored.
  double bob_detects(Basis bob_basis, int bob_det, Basis eve_basis) const {
    return bob_basis == eve_basis ? same_basis_correct : cross_basis[bob_det];
  }
  void validate() const;
};

/// Predicted QBER when Eve intercept-resends every one of Bob's photons in a
/// random basis, read off a measured table. chi weights each cross-basis
/// cell (Alice basis != Bob basis) by the resend probability of Bob's
/// detector; the denominator is the grand total of all four blocks.
QberReport qber_with_eve_prediction(const CoincidenceTable& table,
                                    const std::array<double, 2>& cross_basis);
QberReport qber_with_eve_prediction(const CoincidenceTable& table, double p_resend = 0.5);

/// Three-party probability P_ijk(Ai_s, Bj_t, Ek_t) = R_ik(Ai_s, Ek_t) * p_j(Bj_t; k),
/// with R read from the grand-total-normalized table block (i, k), taking
/// Eve's detectors to be Bob's.
double three_party_probability(const CoincidenceTable& table, Basis i, Basis j, Basis k, int s,
                               int t, const ResendProbabilities& resend);

/// Strict: a QBER equal to the threshold does not abort.
bool abort_decision(const QberReport& report, double threshold);

}  // namespace eprqkd
