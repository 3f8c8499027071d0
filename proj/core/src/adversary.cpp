#include "eprqkd/adversary.hpp"

#include <string>

#include "eprqkd/errors.hpp"

namespace eprqkd {

std::string_view to_string(BasisPolicy policy) {
  switch (policy) {
    case BasisPolicy::none: return "none";
    case BasisPolicy::always_x: return "always_x";
    case BasisPolicy::always_p: return "always_p";
    case BasisPolicy::uniform_random: return "uniform_random";
  }
  return "?";
}

BasisPolicy parse_basis_policy(std::string_view text) {
  for (auto p : {BasisPolicy::none, BasisPolicy::always_x, BasisPolicy::always_p,
                 BasisPolicy::uniform_random}) {
    if (text == to_string(p)) return p;
  }
  throw ValidationError("unknown attack policy '" + std::string(text) + "'");
}

void AttackConfig::validate() const { resend.validate(); }

StationConfig eve_station(const AttackConfig& attack, const StationConfig& bob) {
  return attack.eve_station ? *attack.eve_station : bob.without_filters();
}

ClickOutcome Interception::bob_click(Basis bob_basis, const StationConfig& bob,
                                     RandomStream& rng) const {
  if (blocked()) return ClickOutcome::Null;
  int det = -1;
  if (bob_basis == record_.basis) {
    const int eve_det = logical_bit(record_.outcome);
    det = rng.bernoulli(resend_.same_basis_correct) ? eve_det : 1 - eve_det;
  } else {
    const double u = rng.uniform();
    if (u < resend_.cross_basis[0]) {
      det = 0;
    } else if (u < resend_.cross_basis[0] + resend_.cross_basis[1]) {
      det = 1;
    } else {
      return ClickOutcome::Null;
    }
  }
  const double t = bob.detector(bob_basis, det).transmission;
  if (t < 1.0 && !rng.bernoulli(t)) return ClickOutcome::Null;
  return outcome_for_index(det);
}

Basis choose_eve_basis(BasisPolicy policy, RandomStream& rng) {
  switch (policy) {
    case BasisPolicy::always_x: return Basis::x;
    case BasisPolicy::always_p: return Basis::p;
    case BasisPolicy::uniform_random: return rng.basis();
    case BasisPolicy::none: break;
  }
  throw ValidationError("no eavesdropper basis for policy 'none'");
}

Interception intercept(const PairSample& sample, const AttackConfig& attack, Basis eve_basis,
                       const StationConfig& eve, RandomStream& rng) {
  const double coordinate = readout_coordinate(sample, eve, eve_basis, Side::B);
  const ClickOutcome seen = detect(coordinate, eve.detectors(eve_basis), rng);
  return Interception(EveRecord{eve_basis, seen}, attack.resend);
}

Interception intercept(const PairSample& sample, const AttackConfig& attack,
                       const StationConfig& bob, RandomStream& rng) {
  const Basis b = choose_eve_basis(attack.policy, rng);
  return intercept(sample, attack, b, eve_station(attack, bob), rng);
}

QberReport predicted_qber(const AttackConfig& attack, const CoincidenceTable& table) {
  attack.validate();
  switch (attack.policy) {
    case BasisPolicy::none: return qber_from_counts(table);
    case BasisPolicy::uniform_random:
      return qber_with_eve_prediction(table, attack.resend.cross_basis);
    default: break;
  }
  throw ValidationError("closed-form QBER prediction needs policy uniform_random or none, got " +
                        std::string(to_string(attack.policy)));
}

}  // namespace eprqkd
