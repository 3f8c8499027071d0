#pragma once

#include <optional>
#include <string_view>

#include "eprqkd/detection.hpp"
#include "eprqkd/qber.hpp"
#include "eprqkd/random.hpp"
#include "eprqkd/source_model.hpp"

namespace eprqkd {

enum class BasisPolicy { none, always_x, always_p, uniform_random };

std::string_view to_string(BasisPolicy policy);
BasisPolicy parse_basis_policy(std::string_view text);

/// Intercept-resend eavesdropper on Bob's channel.
struct AttackConfig {
  BasisPolicy policy = BasisPolicy::uniform_random;
  ResendProbabilities resend;
  /// Eve's receiver. Unset means a filter-free copy of Bob's station.
  std::optional<StationConfig> eve_station;

  void validate() const;
};

/// Eve's receiver for an attack on `bob`.
StationConfig eve_station(const AttackConfig& attack, const StationConfig& bob);

/// Eve's measurement of Bob's photon. A Null outcome means she lost the
/// photon and Bob receives nothing.
struct EveRecord {
  Basis basis = Basis::x;
  ClickOutcome outcome = ClickOutcome::Null;
};

/// Outcome of one interception. `bob_click` generates Bob's response to the
/// photon Eve re-prepared.
class Interception {
 public:
  Interception(EveRecord record, ResendProbabilities resend)
      : record_(record), resend_(resend) {}

  const EveRecord& record() const { return record_; }
  bool blocked() const { return record_.outcome == ClickOutcome::Null; }

  /// Same basis as Eve: her detector with probability same_basis_correct,
  /// otherwise the other one. Other basis: detector 1 / 2 / miss with the
  /// cross-basis probabilities. Bob's neutral filters thin the click.
  ClickOutcome bob_click(Basis bob_basis, const StationConfig& bob, RandomStream& rng) const;

 private:
  EveRecord record_;
  ResendProbabilities resend_;
};

Basis choose_eve_basis(BasisPolicy policy, RandomStream& rng);

/// Eve reads Bob's latent quadrature in `eve_basis` with `eve`.
Interception intercept(const PairSample& sample, const AttackConfig& attack, Basis eve_basis,
                       const StationConfig& eve, RandomStream& rng);

/// Draws Eve's basis from the policy, then intercepts. Requires policy != none.
Interception intercept(const PairSample& sample, const AttackConfig& attack,
                       const StationConfig& bob, RandomStream& rng);

/// Closed-form QBER prediction from a measured table. uniform_random uses the
/// cross-basis resend probabilities; none reduces to qber_from_counts.
/// Throws ValidationError for the fixed-basis policies.
QberReport predicted_qber(const AttackConfig& attack, const CoincidenceTable& table);

}  // namespace eprqkd
