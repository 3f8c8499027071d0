#include "commands.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <sstream>

#include "eprqkd/adversary.hpp"
#include "eprqkd/errors.hpp"
#include "eprqkd/experiment.hpp"
#include "eprqkd/scan_io.hpp"
#include "eprqkd/session.hpp"
#include "eprqkd/table_io.hpp"
#include "files.hpp"

namespace eprqkd::cli {

using nlohmann::json;

namespace {

std::string format(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string pairing_label(const DetectorLabel& fixed) {
  const char* b = fixed.basis == Basis::x ? "x" : "p";
  const int i = fixed.index + 1;
  return fixed.basis == Basis::x ? format("A%s%d-B%s%d", b, i, b, i)
                                 : format("A%s%d+B%s%d", b, i, b, i);
}

const char* variance_unit(Basis b) { return b == Basis::x ? "mm^2" : "hbar^2/mm^2"; }

json source_json(const SourceModel& s) {
  return {{"sigma_minus_mm", s.sigma_minus()},
          {"sigma_plus_mm", s.sigma_plus()},
          {"kappa_minus_hbar_per_mm", s.kappa_minus()},
          {"kappa_plus_hbar_per_mm", s.kappa_plus()},
          {"epr_product_hbar2", s.epr_product()},
          {"entangled", s.entangled()}};
}

json stations_json(const StationPair& stations) {
  json out = json::object();
  for (Side side : {Side::A, Side::B}) {
    for (Basis b : kBases) {
      for (int i = 0; i < 2; ++i) {
        const auto& d = stations[side].detector(b, i);
        out[DetectorLabel{side, b, i}.str()] = {
            {"center_mm", d.center_mm}, {"width_mm", d.width_mm}, {"transmission", d.transmission}};
      }
    }
  }
  return out;
}

CoincidenceTable load_table(const TableInput& input, json& results) {
  const auto status = verify_checksum(input.path, input.no_verify);
  results["table"] = input.path.string();
  results["checksum"] = std::string(to_string(status));
  return read_table_csv(input.path);
}

std::string qber_text(const QberReport& r) {
  std::ostringstream os;
  os << format("QBER      %.4f +- %.4f (dimensionless)\n", r.qber, r.uncertainty);
  if (r.qber_xx) os << format("QBER xx   %.4f\n", *r.qber_xx);
  if (r.qber_pp) os << format("QBER pp   %.4f\n", *r.qber_pp);
  os << format("wrong     %.0f counts\n", r.p_wrong);
  os << format("right     %.0f counts\n", r.p_right);
  if (r.chi) os << format("chi       %.2f counts\n", *r.chi);
  os << format("denominator %.0f counts\n", r.denominator);
  return os.str();
}

std::vector<VarianceMeasurement> wrap_values(const std::vector<double>& values,
                                             const std::vector<double>& errors, Basis basis) {
  if (!errors.empty() && errors.size() != values.size()) {
    throw ValidationError(std::string("epr-check: ") + (basis == Basis::x ? "--err-x" : "--err-p") +
                          " must have one entry per variance");
  }
  std::vector<VarianceMeasurement> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const DetectorLabel fixed{Side::A, basis, static_cast<int>(std::min<std::size_t>(i, 1))};
    VarianceMeasurement m;
    m.label = values.size() <= 2 ? pairing_label(fixed)
                                 : std::string(basis == Basis::x ? "x" : "p") + std::to_string(i + 1);
    m.value = values[i];
    m.uncertainty = errors.empty() ? 0.0 : errors[i];
    out.push_back(m);
  }
  return out;
}

VarianceMeasurement measurement_from_json(const json& j) {
  VarianceMeasurement m;
  m.label = j.at("label").get<std::string>();
  m.value = j.at("value").get<double>();
  m.uncertainty = j.at("uncertainty").get<double>();
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// JSON

json to_json(const QberReport& r) {
  return {{"qber", r.qber},
          {"qber_xx", optional_number(r.qber_xx)},
          {"qber_pp", optional_number(r.qber_pp)},
          {"p_wrong", r.p_wrong},
          {"p_right", r.p_right},
          {"chi", optional_number(r.chi)},
          {"denominator", r.denominator},
          {"uncertainty", r.uncertainty}};
}

json to_json(const GaussianFit& f) {
  json cov = json::array();
  for (const auto& row : f.covariance) cov.push_back(row);
  const auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"amplitude_counts", f.amplitude},
          {"center_mm", finite(f.center_mm)},
          {"sigma_mm", finite(f.sigma_mm)},
          {"offset_counts", f.offset},
          {"covariance", cov},
          {"covariance_order", {"amplitude", "center", "sigma", "offset"}},
          {"chi_square", f.chi_square},
          {"dof", f.dof},
          {"iterations", f.iterations},
          {"converged", f.converged},
          {"degenerate_flat", f.degenerate_flat}};
}

json to_json(const VarianceMeasurement& m) {
  json j = {{"label", m.label}, {"value", m.value}, {"uncertainty", m.uncertainty}};
  if (m.printed_uncertainty) j["printed_uncertainty"] = *m.printed_uncertainty;
  if (!m.note.empty()) j["note"] = m.note;
  return j;
}

json to_json(const EprCheckResult& r) {
  json x = json::array(), p = json::array();
  for (const auto& m : r.var_x_minus) x.push_back(to_json(m));
  for (const auto& m : r.var_p_plus) p.push_back(to_json(m));
  const auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"var_x_minus_mm2", x},
          {"var_p_plus_hbar2_per_mm2", p},
          {"mean_var_x_mm2", r.mean_x},
          {"mean_var_p_hbar2_per_mm2", r.mean_p},
          {"product_hbar2", r.product},
          {"product_uncertainty_hbar2", r.product_uncertainty},
          {"bound_hbar2", r.bound},
          {"satisfied", r.satisfied},
          {"sigma_distance", finite(r.sigma_distance)}};
}

json to_json(const CoincidenceTable& t) {
  json out = json::object();
  for (int a = 0; a < 4; ++a) {
    json row = json::object();
    for (int b = 0; b < 4; ++b) row[DetectorLabel::from_channel(Side::B, b).str()] = t.at(a, b);
    out[DetectorLabel::from_channel(Side::A, a).str()] = row;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

Outcome cmd_qber(const TableInput& input) {
  Outcome out;
  const CoincidenceTable table = load_table(input, out.results);
  const QberReport r = qber_from_counts(table);
  out.results["qber"] = to_json(r);
  out.text = qber_text(r);
  return out;
}

Outcome cmd_eve_predict(const TableInput& input, const std::array<double, 2>& cross_basis) {
  Outcome out;
  const CoincidenceTable table = load_table(input, out.results);
  const QberReport r = qber_with_eve_prediction(table, cross_basis);
  out.results["p_cross"] = cross_basis;
  out.results["qber"] = to_json(r);
  out.text = format("p_cross   %.4f, %.4f\n", cross_basis[0], cross_basis[1]) + qber_text(r);
  return out;
}

Outcome cmd_simulate(const RunConfig& config_in, const SimulateOptions& options) {
  RunConfig config = config_in;
  if (options.attack_policy) {
    const BasisPolicy p = parse_basis_policy(*options.attack_policy);
    if (p == BasisPolicy::none) {
      config.attack.reset();
    } else {
      if (!config.attack) config.attack.emplace();
      config.attack->policy = p;
    }
  }
  config.session.seed = resolve_seed(options.seed, config);
  validate(config);

  const Experiment exp = make_experiment(config.experiment);
  const SessionResult r = run_session(exp.source, exp.stations, config.session, config.attack);

  Outcome out;
  out.seed = config.session.seed;
  out.config_hash = config.hash;
  out.results = {
      {"source", source_json(exp.source)},
      {"stations", stations_json(exp.stations)},
      {"accumulation", std::string(to_string(config.session.accumulation))},
      {"attack", config.attack ? std::string(to_string(config.attack->policy)) : "none"},
      {"coincidences", r.events.size()},
      {"emitted_pairs", r.emitted_pairs},
      {"sifted", r.sifted.size()},
      {"sifted_fraction", r.sifted_fraction()},
      {"estimation_pairs", r.estimation.size()},
      {"estimate", to_json(r.estimate)},
      {"qber_threshold", config.session.qber_threshold},
      {"aborted", r.aborted},
      {"key_length", r.key_A.size()},
      {"key_disagreement", r.key_disagreement()},
      {"table", to_json(r.table)}};

  const auto dir = options.out_dir ? *options.out_dir : config.output_dir;
  if (!dir.empty()) {
    const auto bits = [](const std::vector<std::uint8_t>& key) {
      std::string s(key.size(), '0');
      for (std::size_t i = 0; i < key.size(); ++i) s[i] = static_cast<char>('0' + key[i]);
      return s + '\n';
    };
    write_atomic(dir / "key_A.txt", bits(r.key_A));
    write_atomic(dir / "key_B.txt", bits(r.key_B));
    write_atomic(dir / "table.csv", format_table_csv(r.table));
    out.results["files"] = {(dir / "key_A.txt").string(), (dir / "key_B.txt").string(),
                            (dir / "table.csv").string()};
  }

  std::ostringstream os;
  os << format("seed            %llu\n", static_cast<unsigned long long>(config.session.seed));
  os << format("attack          %s\n", out.results["attack"].get<std::string>().c_str());
  os << format("coincidences    %zu (from %llu emitted pairs)\n", r.events.size(),
               static_cast<unsigned long long>(r.emitted_pairs));
  os << format("sifted          %zu (fraction %.4f)\n", r.sifted.size(), r.sifted_fraction());
  os << format("estimated QBER  %.4f +- %.4f on %zu pairs\n", r.estimate.qber,
               r.estimate.uncertainty, r.estimation.size());
  os << format("key             %zu bits, disagreement %.4f\n", r.key_A.size(),
               r.key_disagreement());
  os << format("decision        %s (threshold %.3f)\n", r.aborted ? "ABORT" : "continue",
               config.session.qber_threshold);
  out.text = os.str();
  out.exit_code = r.aborted ? kExitAborted : kExitOk;
  return out;
}

Outcome cmd_scan(const RunConfig& config_in, const ScanOptions& options) {
  RunConfig config = config_in;
  validate(config);
  if (options.fixed.side != Side::A) throw ValidationError("scan: --fixed must name one of Alice's detectors");
  const std::uint64_t seed = resolve_seed(options.seed, config);
  const std::uint64_t pairs = options.pairs_per_point.value_or(config.scan_pairs_per_point);
  if (pairs == 0) throw ValidationError("scan: --pairs must be positive");
  const auto positions = options.grid.points();

  const Experiment exp = make_experiment(config.experiment);
  const ScanData scan =
      scan_simulation(exp.source, exp.stations, options.fixed, options.basis_B, positions, pairs, seed);
  const GaussianFit fit = fit_gaussian(scan);
  const bool flat = is_flat(scan);

  Outcome out;
  out.seed = seed;
  out.config_hash = config.hash;
  out.results = {{"fixed_detector", options.fixed.str()},
                 {"basis_A", std::string(to_string(options.fixed.basis))},
                 {"basis_B", std::string(to_string(options.basis_B))},
                 {"pairs_per_point", pairs},
                 {"positions_mm", scan.positions_mm},
                 {"counts", scan.counts},
                 {"max_min_ratio", max_min_ratio(scan.counts)},
                 {"flat", flat},
                 {"fit", to_json(fit)}};

  std::ostringstream os;
  os << format("scan      %s fixed, Bob %s basis, %zu points, %llu pairs per point\n",
               options.fixed.str().c_str(), std::string(to_string(options.basis_B)).c_str(),
               scan.size(), static_cast<unsigned long long>(pairs));
  os << format("max/min   %.3f%s\n", max_min_ratio(scan.counts), flat ? " (flat)" : "");
  if (fit.degenerate_flat) {
    os << format("fit       flat, offset %.1f counts\n", fit.offset);
  } else {
    os << format("fit       center %.4f +- %.4f mm, sigma %.4f +- %.4f mm, amplitude %.1f counts, "
                 "offset %.1f counts, %s\n",
                 fit.center_mm, fit.error(kCenter), fit.sigma_mm, fit.error(kSigma), fit.amplitude,
                 fit.offset, fit.converged ? "converged" : "NOT converged");
  }
  if (options.fixed.basis == options.basis_B && !fit.degenerate_flat && fit.converged) {
    const double scale = config.experiment.calibration.units.scale(options.basis_B);
    const auto m = variance_from_fit(fit, scale, pairing_label(options.fixed));
    out.results["variance"] = to_json(m);
    out.results["variance"]["basis"] = std::string(to_string(options.basis_B));
    os << format("variance  %s = %.4f +- %.4f %s\n", m.label.c_str(), m.value, m.uncertainty,
                 variance_unit(options.basis_B));
  }
  if (options.csv_out) {
    write_atomic(*options.csv_out, format_scan_csv(scan));
    out.results["csv"] = options.csv_out->string();
  }
  out.text = os.str();
  return out;
}

Outcome cmd_epr_check(const EprInputs& in) {
  const int sources = (!in.var_x.empty() || !in.var_p.empty()) + !in.fit_reports.empty() +
                      in.reference + in.simulate_config.has_value();
  if (sources == 0) {
    throw ValidationError(
        "epr-check: give variances (--var-x/--var-p), --fits, --reference or --simulate");
  }
  if (sources > 1) throw ValidationError("epr-check: choose exactly one input source");

  Outcome out;
  std::vector<VarianceMeasurement> xs, ps;
  std::string origin;
  if (in.reference) {
    auto ref = reference_variances();
    xs = ref.x;
    ps = ref.p;
    origin = "reference";
  } else if (!in.var_x.empty() || !in.var_p.empty()) {
    if (in.var_x.empty() || in.var_p.empty()) {
      throw ValidationError("epr-check: both --var-x and --var-p are required");
    }
    xs = wrap_values(in.var_x, in.err_x, Basis::x);
    ps = wrap_values(in.var_p, in.err_p, Basis::p);
    origin = "values";
  } else if (!in.fit_reports.empty()) {
    for (const auto& path : in.fit_reports) {
      json report;
      try {
        report = json::parse(read_file(path));
      } catch (const json::parse_error& e) {
        throw ParseError("epr-check: " + path.string() + " is not JSON: " + e.what());
      }
      const json* results = report.contains("results") ? &report["results"] : &report;
      if (!results->contains("variance")) {
        throw ValidationError("epr-check: " + path.string() +
                              " has no variance (needs a converged same-basis scan fit)");
      }
      const json& v = (*results)["variance"];
      (v.at("basis").get<std::string>() == "x" ? xs : ps).push_back(measurement_from_json(v));
    }
    origin = "fits";
  } else {
    const RunConfig config = load_run_config(*in.simulate_config);
    validate(config);
    const std::uint64_t seed = resolve_seed(in.seed, config);
    out.seed = seed;
    out.config_hash = config.hash;
    const Experiment exp = make_experiment(config.experiment);
    ScanGrid grid;
    const auto positions = grid.points();
    json fits = json::array();
    std::uint64_t offset = 0;
    for (Basis b : kBases) {
      for (int i = 0; i < 2; ++i) {
        const DetectorLabel fixed{Side::A, b, i};
        const ScanData scan = scan_simulation(exp.source, exp.stations, fixed, b, positions,
                                              config.scan_pairs_per_point, seed + 7919 * ++offset);
        const GaussianFit fit = fit_gaussian(scan);
        const double scale = config.experiment.calibration.units.scale(b);
        (b == Basis::x ? xs : ps).push_back(variance_from_fit(fit, scale, pairing_label(fixed)));
        fits.push_back({{"fixed_detector", fixed.str()}, {"fit", to_json(fit)}});
      }
    }
    out.results["scan_fits"] = fits;
    origin = "simulated scans";
  }

  const EprCheckResult r = duan_check(xs, ps);
  out.results["inputs"] = origin;
  out.results["epr"] = to_json(r);

  std::ostringstream os;
  for (const auto& m : r.var_x_minus) {
    os << format("%-9s %.4f +- %.4f mm^2\n", m.label.c_str(), m.value, m.uncertainty);
  }
  for (const auto& m : r.var_p_plus) {
    os << format("%-9s %.4f +- %.4f hbar^2/mm^2", m.label.c_str(), m.value, m.uncertainty);
    if (m.printed_uncertainty) os << format(" (printed +- %.2f)", *m.printed_uncertainty);
    os << '\n';
  }
  os << format("mean      %.4f mm^2 x %.4f hbar^2/mm^2\n", r.mean_x, r.mean_p);
  os << format("product   %.4f +- %.4f hbar^2 (%.2f hbar^2)\n", r.product, r.product_uncertainty,
               r.product);
  os << format("bound     %.2f hbar^2\n", r.bound);
  os << format("satisfied %s, %.1f standard deviations below the bound\n",
               r.satisfied ? "yes" : "no", r.sigma_distance);
  out.text = os.str();
  return out;
}

}  // namespace eprqkd::cli
