#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "eprqkd/errors.hpp"
#include "files.hpp"
#include "run_config.hpp"

namespace {

using namespace eprqkd;
using namespace eprqkd::cli;

std::array<double, 2> parse_cross(const std::vector<double>& v) {
  if (v.size() != 2) throw ValidationError("--p-cross needs two values");
  return {v[0], v[1]};
}

RunConfig config_or_default(const std::string& path) {
  return path.empty() ? RunConfig{} : load_run_config(path);
}

std::optional<std::uint64_t> if_given(const CLI::Option* opt, std::uint64_t value) {
  return opt->count() > 0 ? std::optional(value) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Position/momentum EPR key distribution: simulation and analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "eprqkd 0.3.0");

  std::string report_path;
  const auto add_report = [&](CLI::App* sub) {
    sub->add_option("--report", report_path, "Write a JSON report to this file");
  };

  // qber
  TableInput qber_in;
  auto* qber = app.add_subcommand("qber", "QBER of a coincidence table");
  qber->add_option("table", qber_in.path, "Coincidence table CSV")->required();
  qber->add_flag("--no-verify", qber_in.no_verify, "Skip the .sha256 checksum");
  add_report(qber);

  // eve-predict
  TableInput eve_in;
  double p_resend = 0.5;
  std::vector<double> p_cross;
  auto* eve = app.add_subcommand("eve-predict", "Predicted QBER under intercept-resend");
  eve->add_option("table", eve_in.path, "Coincidence table CSV")->required();
  auto* p_opt = eve->add_option("--p", p_resend, "Resend probability for each of Bob's detectors");
  eve->add_option("--p-cross", p_cross, "Per-detector resend probabilities, e.g. 1,0")
      ->delimiter(',')
      ->expected(2)
      ->excludes(p_opt);
  eve->add_flag("--no-verify", eve_in.no_verify, "Skip the .sha256 checksum");
  add_report(eve);

  // simulate
  std::string sim_config;
  SimulateOptions sim;
  std::uint64_t sim_seed = 0;
  std::string sim_out, sim_attack;
  auto* simulate = app.add_subcommand("simulate", "Run a key-distribution session");
  simulate->add_option("config", sim_config, "Config file (defaults if omitted)");
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "Random seed");
  simulate->add_option("--out", sim_out, "Directory for key_A.txt, key_B.txt, table.csv");
  simulate->add_option("--attack", sim_attack, "none, always_x, always_p or uniform_random");
  add_report(simulate);

  // scan
  std::string scan_config, scan_fixed, scan_bases = "", scan_grid = "0:3:0.1", scan_out;
  std::uint64_t scan_pairs = 0, scan_seed = 0;
  auto* scan = app.add_subcommand("scan", "Simulate a detector scan and fit it");
  scan->add_option("config", scan_config, "Config file (defaults if omitted)");
  scan->add_option("--fixed", scan_fixed, "Alice's fixed detector, e.g. Ax1")->required();
  scan->add_option("--bases", scan_bases, "Basis pair, e.g. xx or xp (default: same basis)");
  scan->add_option("--grid", scan_grid, "start:stop:step in mm")->capture_default_str();
  auto* scan_pairs_opt = scan->add_option("--pairs", scan_pairs, "Pairs per grid point");
  auto* scan_seed_opt = scan->add_option("--seed", scan_seed, "Random seed");
  scan->add_option("--out", scan_out, "Scan CSV output");
  add_report(scan);

  // epr-check
  EprInputs epr;
  std::string epr_sim;
  std::uint64_t epr_seed = 0;
  auto* check = app.add_subcommand("epr-check", "Separability test on conditional variances");
  check->add_option("--var-x", epr.var_x, "Position variances, mm^2")->delimiter(',');
  check->add_option("--var-p", epr.var_p, "Momentum variances, hbar^2/mm^2")->delimiter(',');
  check->add_option("--err-x", epr.err_x, "Uncertainties of --var-x")->delimiter(',');
  check->add_option("--err-p", epr.err_p, "Uncertainties of --var-p")->delimiter(',');
  check->add_option("--fits", epr.fit_reports, "JSON reports written by `scan --report`")
      ->delimiter(',');
  check->add_flag("--reference", epr.reference, "Use the published variances");
  check->add_option("--simulate", epr_sim, "Simulate the four scans from this config");
  auto* epr_seed_opt = check->add_option("--seed", epr_seed, "Random seed for --simulate");
  add_report(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  const auto started = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    if (qber->parsed()) {
      outcome = cmd_qber(qber_in);
    } else if (eve->parsed()) {
      const auto cross = p_cross.empty() ? std::array<double, 2>{p_resend, p_resend}
                                         : parse_cross(p_cross);
      outcome = cmd_eve_predict(eve_in, cross);
    } else if (simulate->parsed()) {
      sim.seed = if_given(sim_seed_opt, sim_seed);
      if (!sim_out.empty()) sim.out_dir = sim_out;
      if (!sim_attack.empty()) sim.attack_policy = sim_attack;
      outcome = cmd_simulate(config_or_default(sim_config), sim);
    } else if (scan->parsed()) {
      ScanOptions opts;
      opts.fixed = DetectorLabel::parse(scan_fixed);
      opts.basis_B = opts.fixed.basis;
      if (!scan_bases.empty()) {
        if (scan_bases.size() != 2) throw ValidationError("--bases must be two letters, e.g. xp");
        if (parse_basis(scan_bases.substr(0, 1)) != opts.fixed.basis) {
          throw ValidationError("--bases must start with the fixed detector's basis");
        }
        opts.basis_B = parse_basis(scan_bases.substr(1, 1));
      }
      opts.grid = ScanGrid::parse(scan_grid);
      opts.pairs_per_point = if_given(scan_pairs_opt, scan_pairs);
      opts.seed = if_given(scan_seed_opt, scan_seed);
      if (!scan_out.empty()) opts.csv_out = scan_out;
      outcome = cmd_scan(config_or_default(scan_config), opts);
    } else if (check->parsed()) {
      if (!epr_sim.empty()) epr.simulate_config = epr_sim;
      epr.seed = if_given(epr_seed_opt, epr_seed);
      outcome = cmd_epr_check(epr);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const CalibrationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  std::cout << outcome.text << std::flush;
  if (!report_path.empty()) {
    std::vector<std::string> args(argv, argv + argc);
    nlohmann::json report = {
        {"command", args},
        {"config_hash", outcome.config_hash.empty() ? nlohmann::json(nullptr)
                                                    : nlohmann::json(outcome.config_hash)},
        {"seed", outcome.seed ? nlohmann::json(*outcome.seed) : nlohmann::json(nullptr)},
        {"results", outcome.results},
        {"exit_code", outcome.exit_code},
        {"duration_s", seconds}};
    try {
      write_atomic(report_path, report.dump(2) + "\n");
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitRuntime;
    }
  }
  return outcome.exit_code;
}
