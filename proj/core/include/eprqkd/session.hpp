#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "eprqkd/adversary.hpp"
#include "eprqkd/detection.hpp"
#include "eprqkd/qber.hpp"
#include "eprqkd/source_model.hpp"

namespace eprqkd {

/// How coincidences are accumulated.
///
/// balanced: every accumulated coincidence first gets its basis choices
///   (Alice, Bob and, under attack, Eve), then pairs are emitted until that
///   configuration produces a coincidence. All basis configurations therefore
///   contribute equally, as with equalized coincidence levels.
/// free_running: bases are drawn per emitted pair and coincidences are kept
///   as they come; configurations with higher coincidence probability are
///   over-represented.
enum class Accumulation { balanced, free_running };

std::string_view to_string(Accumulation mode);
Accumulation parse_accumulation(std::string_view text);

struct SessionConfig {
  std::uint64_t coincidences = 100000;     ///< N
  std::uint64_t estimation_pairs = 10000;  ///< m, taken from the sifted events
  double qber_threshold = 0.15;
  std::uint64_t seed = 42;
  /// Give up after max_pairs_factor * N emitted pairs.
  std::uint64_t max_pairs_factor = 10000;
  Accumulation accumulation = Accumulation::balanced;

  /// 0 < m < N / 2 and 0 < threshold < 1.
  void validate() const;
};

/// One coincidence. Only events where both parties clicked are stored.
struct PairEvent {
  Basis basis_A = Basis::x;
  Basis basis_B = Basis::x;
  ClickOutcome outcome_A = ClickOutcome::Null;
  ClickOutcome outcome_B = ClickOutcome::Null;
  std::optional<EveRecord> eve;

  bool same_basis() const { return basis_A == basis_B; }
  bool disagree() const { return logical_bit(outcome_A) != logical_bit(outcome_B); }
};

struct SessionResult {
  std::vector<PairEvent> events;                ///< all N coincidences, in order
  std::vector<std::size_t> sifted;              ///< indices into events
  std::vector<std::size_t> estimation;          ///< indices into events, sorted
  std::vector<std::uint8_t> key_A;              ///< sifted bits minus estimation pairs
  std::vector<std::uint8_t> key_B;
  QberReport estimate;                          ///< on the estimation pairs
  bool aborted = false;
  CoincidenceTable table;                       ///< all N coincidences
  std::uint64_t emitted_pairs = 0;

  double sifted_fraction() const;
  /// Fraction of key positions where Alice's and Bob's bits differ.
  double key_disagreement() const;
};

/// Keeps the events measured in the same basis, preserving order.
std::vector<PairEvent> sift(std::span<const PairEvent> events);
std::vector<std::size_t> sift_indices(std::span<const PairEvent> events);

/// Table of the given events (all of them, or the subset by index).
CoincidenceTable tabulate(std::span<const PairEvent> events);
CoincidenceTable tabulate(std::span<const PairEvent> events, std::span<const std::size_t> subset);

/// Full protocol run: accumulate N coincidences, sift, sacrifice m random
/// sifted pairs for the QBER estimate, decide whether to abort, and return the
/// remaining key bits. Deterministic in config.seed. Throws ConvergenceError
/// when the emitted-pair budget runs out.
SessionResult run_session(const SourceModel& source, const StationPair& stations,
                          const SessionConfig& config,
                          const std::optional<AttackConfig>& attack = std::nullopt);

}  // namespace eprqkd
