#include "eprqkd/session.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>

#include "eprqkd/errors.hpp"

namespace eprqkd {

std::string_view to_string(Accumulation mode) {
  return mode == Accumulation::balanced ? "balanced" : "free_running";
}

Accumulation parse_accumulation(std::string_view text) {
  if (text == "balanced") return Accumulation::balanced;
  if (text == "free_running") return Accumulation::free_running;
  throw ValidationError("unknown accumulation mode '" + std::string(text) + "'");
}

void SessionConfig::validate() const {
  if (coincidences == 0) throw ValidationError("session: N (coincidences) must be positive");
  if (estimation_pairs == 0 || 2 * estimation_pairs >= coincidences) {
    std::ostringstream os;
    os << "session: estimation pairs m = " << estimation_pairs << " must satisfy 0 < m < N/2 = "
       << coincidences / 2.0;
    throw ValidationError(os.str());
  }
  if (!(qber_threshold > 0.0 && qber_threshold < 1.0)) {
    throw ValidationError("session: QBER threshold must lie in (0, 1)");
  }
  if (max_pairs_factor == 0) throw ValidationError("session: max_pairs_factor must be positive");
}

double SessionResult::sifted_fraction() const {
  return events.empty() ? 0.0 : static_cast<double>(sifted.size()) / events.size();
}

double SessionResult::key_disagreement() const {
  if (key_A.empty()) return 0.0;
  std::size_t diff = 0;
  for (std::size_t i = 0; i < key_A.size(); ++i) diff += key_A[i] != key_B[i];
  return static_cast<double>(diff) / key_A.size();
}

std::vector<PairEvent> sift(std::span<const PairEvent> events) {
  std::vector<PairEvent> kept;
  std::copy_if(events.begin(), events.end(), std::back_inserter(kept),
               [](const PairEvent& e) { return e.same_basis(); });
  return kept;
}

std::vector<std::size_t> sift_indices(std::span<const PairEvent> events) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].same_basis()) kept.push_back(i);
  }
  return kept;
}

CoincidenceTable tabulate(std::span<const PairEvent> events) {
  CoincidenceTable t;
  for (const auto& e : events) {
    t.add(e.basis_A, logical_bit(e.outcome_A), e.basis_B, logical_bit(e.outcome_B));
  }
  return t;
}

CoincidenceTable tabulate(std::span<const PairEvent> events, std::span<const std::size_t> subset) {
  CoincidenceTable t;
  for (auto i : subset) {
    const auto& e = events[i];
    t.add(e.basis_A, logical_bit(e.outcome_A), e.basis_B, logical_bit(e.outcome_B));
  }
  return t;
}

namespace {

class Emitter {
 public:
  Emitter(const SourceModel& source, const StationPair& stations,
          const std::optional<AttackConfig>& attack, RandomStream& rng)
      : source_(source), stations_(stations), attack_(attack), rng_(rng) {
    if (attack_) eve_ = eve_station(*attack_, stations_.bob);
  }

  /// One emitted pair with fixed basis choices. Returns true on coincidence.
  bool emit(PairEvent& event) {
    ++emitted_;
    const PairSample s = sample_pair(source_, rng_);
    event.outcome_A = detect(readout_coordinate(s, stations_.alice, event.basis_A, Side::A),
                             stations_.alice.detectors(event.basis_A), rng_);
    if (!is_click(event.outcome_A)) return false;
    if (attack_) {
      const auto ic = intercept(s, *attack_, event.eve->basis, *eve_, rng_);
      event.eve->outcome = ic.record().outcome;
      event.outcome_B = ic.bob_click(event.basis_B, stations_.bob, rng_);
    } else {
      event.outcome_B = detect(readout_coordinate(s, stations_.bob, event.basis_B, Side::B),
                               stations_.bob.detectors(event.basis_B), rng_);
    }
    return is_click(event.outcome_B);
  }

  PairEvent draw_bases() {
    PairEvent e;
    e.basis_A = rng_.basis();
    e.basis_B = rng_.basis();
    if (attack_) e.eve = EveRecord{choose_eve_basis(attack_->policy, rng_), ClickOutcome::Null};
    return e;
  }

  std::uint64_t emitted() const { return emitted_; }

 private:
  const SourceModel& source_;
  const StationPair& stations_;
  const std::optional<AttackConfig>& attack_;
  std::optional<StationConfig> eve_;
  RandomStream& rng_;
  std::uint64_t emitted_ = 0;
};

}  // namespace

SessionResult run_session(const SourceModel& source, const StationPair& stations,
                          const SessionConfig& config, const std::optional<AttackConfig>& attack) {
  config.validate();
  std::optional<AttackConfig> active;
  if (attack && attack->policy != BasisPolicy::none) {
    attack->validate();
    active = attack;
  }

  RandomStream rng(config.seed);
  Emitter emitter(source, stations, active, rng);
  const std::uint64_t budget = config.max_pairs_factor * config.coincidences;
  const auto out_of_budget = [&](std::size_t collected) {
    std::ostringstream os;
    os << "session gave up after " << emitter.emitted() << " emitted pairs with only "
       << collected << " of " << config.coincidences << " coincidences";
    throw ConvergenceError(os.str(), static_cast<double>(collected));
  };

  SessionResult result;
  result.events.reserve(config.coincidences);
  while (result.events.size() < config.coincidences) {
    if (config.accumulation == Accumulation::balanced) {
      PairEvent e = emitter.draw_bases();
      while (!emitter.emit(e)) {
        if (emitter.emitted() >= budget) out_of_budget(result.events.size());
      }
      result.events.push_back(e);
    } else {
      PairEvent e = emitter.draw_bases();
      if (emitter.emit(e)) result.events.push_back(e);
      if (emitter.emitted() >= budget && result.events.size() < config.coincidences) {
        out_of_budget(result.events.size());
      }
    }
  }
  result.emitted_pairs = emitter.emitted();
  result.table = tabulate(result.events);
  result.sifted = sift_indices(result.events);

  if (result.sifted.size() <= config.estimation_pairs) {
    std::ostringstream os;
    os << "only " << result.sifted.size() << " sifted events for " << config.estimation_pairs
       << " estimation pairs";
    throw ConvergenceError(os.str(), static_cast<double>(result.sifted.size()));
  }

  // Partial Fisher-Yates: the first m entries become the estimation sample.
  std::vector<std::size_t> pool = result.sifted;
  for (std::size_t i = 0; i < config.estimation_pairs; ++i) {
    const auto j = i + rng.index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  result.estimation.assign(pool.begin(), pool.begin() + config.estimation_pairs);
  std::sort(result.estimation.begin(), result.estimation.end());

  result.estimate = qber_from_counts(tabulate(result.events, result.estimation));
  result.aborted = abort_decision(result.estimate, config.qber_threshold);

  std::size_t next = 0;
  for (auto i : result.sifted) {
    if (next < result.estimation.size() && result.estimation[next] == i) {
      ++next;
      continue;
    }
    result.key_A.push_back(static_cast<std::uint8_t>(logical_bit(result.events[i].outcome_A)));
    result.key_B.push_back(static_cast<std::uint8_t>(logical_bit(result.events[i].outcome_B)));
  }
  return result;
}

}  // namespace eprqkd
