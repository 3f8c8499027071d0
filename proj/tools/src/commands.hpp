#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eprqkd/analysis.hpp"
#include "eprqkd/basis.hpp"
#include "run_config.hpp"

namespace eprqkd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitAborted = 4;

/// What a command hands back to main: machine-readable results, the text
/// printed to stdout, and the exit code.
struct Outcome {
  nlohmann::json results = nlohmann::json::object();
  std::string text;
  int exit_code = kExitOk;
  std::optional<std::uint64_t> seed;
  std::string config_hash;
};

struct TableInput {
  std::filesystem::path path;
  bool no_verify = false;
};

Outcome cmd_qber(const TableInput& input);
Outcome cmd_eve_predict(const TableInput& input, const std::array<double, 2>& cross_basis);

struct SimulateOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::string> attack_policy;  ///< overrides attack.policy
};
Outcome cmd_simulate(const RunConfig& config, const SimulateOptions& options);

struct ScanOptions {
  DetectorLabel fixed;
  Basis basis_B = Basis::x;
  ScanGrid grid;
  std::optional<std::uint64_t> pairs_per_point;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> csv_out;
};
Outcome cmd_scan(const RunConfig& config, const ScanOptions& options);

/// Exactly one input source must be given.
struct EprInputs {
  std::vector<double> var_x, var_p, err_x, err_p;
  std::vector<std::filesystem::path> fit_reports;  ///< JSON reports from `scan`
  bool reference = false;                          ///< the published variances
  std::optional<std::filesystem::path> simulate_config;
  std::optional<std::uint64_t> seed;
};
Outcome cmd_epr_check(const EprInputs& inputs);

nlohmann::json to_json(const QberReport& r);
nlohmann::json to_json(const GaussianFit& f);
nlohmann::json to_json(const VarianceMeasurement& m);
nlohmann::json to_json(const EprCheckResult& r);
nlohmann::json to_json(const CoincidenceTable& t);

}  // namespace eprqkd::cli
