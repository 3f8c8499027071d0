#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "eprqkd/adversary.hpp"
#include "eprqkd/experiment.hpp"
#include "eprqkd/session.hpp"

namespace eprqkd::cli {

/// Everything a config file can set. Defaults reproduce the standard
/// apparatus; see data/default.cfg for the key list.
struct RunConfig {
  ExperimentSpec experiment;
  SessionConfig session;
  bool session_seed_set = false;
  /// Unset when attack.policy = none.
  std::optional<AttackConfig> attack;
  std::filesystem::path output_dir;
  std::uint64_t scan_pairs_per_point = 10'000'000;
  /// SHA-256 of the config text, empty for the built-in defaults.
  std::string hash;
};

/// Flat `key = value` lines with dotted section names; '#' starts a comment.
/// Unknown or repeated keys and malformed values throw ParseError with the
/// line number. Cross-field checks run in validate().
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Module-level validation of everything the config set.
void validate(const RunConfig& config);

/// --seed beats session.seed, which beats $EPRQKD_SEED, which beats 42.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const RunConfig& config);

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr const char* kSeedEnv = "EPRQKD_SEED";

}  // namespace eprqkd::cli
