#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "eprqkd/errors.hpp"
#include "files.hpp"

namespace eprqkd::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw ParseError("config line " + std::to_string(line) + ": " + msg);
}

double to_double(std::string_view v, std::size_t line) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    fail(line, "expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

std::uint64_t to_uint(std::string_view v, std::size_t line) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    fail(line, "expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool to_bool(std::string_view v, std::size_t line) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  fail(line, "expected true or false, got '" + std::string(v) + "'");
}

std::array<double, 2> to_pair(std::string_view v, std::size_t line) {
  const auto comma = v.find(',');
  if (comma == std::string_view::npos || v.find(',', comma + 1) != std::string_view::npos) {
    fail(line, "expected two comma-separated numbers, got '" + std::string(v) + "'");
  }
  return {to_double(trim(v.substr(0, comma)), line), to_double(trim(v.substr(comma + 1)), line)};
}

template <typename Parse>
auto rethrow_as_parse(std::size_t line, Parse&& parse) {
  try {
    return parse();
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    fail(line, e.what());
  }
}

using Setter = std::function<void(RunConfig&, std::string_view, std::size_t)>;

struct Pending {
  std::optional<double> sigma_minus, sigma_plus, kappa_minus;
  std::optional<double> wavenumber[2];
  std::optional<double> wavelength[2];
};

std::map<std::string, Setter, std::less<>> setters(Pending& pending) {
  std::map<std::string, Setter, std::less<>> s;
  auto num = [&s](const std::string& key, auto member) {
    s[key] = [member](RunConfig& c, std::string_view v, std::size_t line) {
      member(c) = to_double(v, line);
    };
  };
  num("source.pump_waist_mm", [](RunConfig& c) -> double& { return c.experiment.calibration.pump.waist_mm; });
  num("source.kappa_plus_per_mm", [](RunConfig& c) -> double& { return c.experiment.calibration.kappa_plus; });
  s["source.sigma_minus_mm"] = [&](RunConfig&, std::string_view v, std::size_t l) { pending.sigma_minus = to_double(v, l); };
  s["source.sigma_plus_mm"] = [&](RunConfig&, std::string_view v, std::size_t l) { pending.sigma_plus = to_double(v, l); };
  s["source.kappa_minus_per_mm"] = [&](RunConfig&, std::string_view v, std::size_t l) { pending.kappa_minus = to_double(v, l); };

  num("calibration.target_var_x_mm2", [](RunConfig& c) -> double& { return c.experiment.calibration.targets.var_x; });
  num("calibration.target_var_p", [](RunConfig& c) -> double& { return c.experiment.calibration.targets.var_p; });
  num("units.position_scale", [](RunConfig& c) -> double& { return c.experiment.calibration.units.position_scale; });
  num("units.momentum_scale", [](RunConfig& c) -> double& { return c.experiment.calibration.units.momentum_scale; });

  for (int side = 0; side < 2; ++side) {
    const std::string prefix = side == 0 ? "station_A." : "station_B.";
    const auto optics = [side](RunConfig& c) -> StationOptics& {
      return side == 0 ? c.experiment.optics_A : c.experiment.optics_B;
    };
    num(prefix + "object_distance_mm", [optics](RunConfig& c) -> double& { return optics(c).object_distance_mm; });
    num(prefix + "image_distance_mm", [optics](RunConfig& c) -> double& { return optics(c).image_distance_mm; });
    num(prefix + "focal_length_mm", [optics](RunConfig& c) -> double& { return optics(c).focal_length_mm; });
    s[prefix + "wavenumber_per_mm"] = [&pending, side](RunConfig&, std::string_view v, std::size_t l) {
      pending.wavenumber[side] = to_double(v, l);
    };
    s[prefix + "wavelength_nm"] = [&pending, side](RunConfig&, std::string_view v, std::size_t l) {
      pending.wavelength[side] = to_double(v, l);
    };
  }

  num("detectors.slit_x_mm", [](RunConfig& c) -> double& { return c.experiment.slit_x_mm; });
  num("detectors.slit_p_mm", [](RunConfig& c) -> double& { return c.experiment.slit_p_mm; });
  s["detectors.bob_x_centers_mm"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.experiment.bob_x_centers_mm = to_pair(v, l); };
  s["detectors.bob_p_centers_mm"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.experiment.bob_p_centers_mm = to_pair(v, l); };
  s["detectors.alice_x_centers_mm"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.experiment.alice_x_centers_mm = to_pair(v, l); };
  s["detectors.alice_p_centers_mm"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.experiment.alice_p_centers_mm = to_pair(v, l); };
  s["detectors.equalize"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.experiment.equalize = to_bool(v, l); };

  s["session.coincidences"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.session.coincidences = to_uint(v, l); };
  s["session.estimation_pairs"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.session.estimation_pairs = to_uint(v, l); };
  s["session.qber_threshold"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.session.qber_threshold = to_double(v, l); };
  s["session.seed"] = [](RunConfig& c, std::string_view v, std::size_t l) {
    c.session.seed = to_uint(v, l);
    c.session_seed_set = true;
  };
  s["session.max_pairs_factor"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.session.max_pairs_factor = to_uint(v, l); };
  s["session.accumulation"] = [](RunConfig& c, std::string_view v, std::size_t l) {
    c.session.accumulation = rethrow_as_parse(l, [&] { return parse_accumulation(v); });
  };

  const auto attack = [](RunConfig& c) -> AttackConfig& {
    if (!c.attack) c.attack.emplace();
    return *c.attack;
  };
  s["attack.policy"] = [attack](RunConfig& c, std::string_view v, std::size_t l) {
    const BasisPolicy p = rethrow_as_parse(l, [&] { return parse_basis_policy(v); });
    attack(c).policy = p;
  };
  s["attack.p_same"] = [attack](RunConfig& c, std::string_view v, std::size_t l) { attack(c).resend.same_basis_correct = to_double(v, l); };
  s["attack.p_cross"] = [attack](RunConfig& c, std::string_view v, std::size_t l) { attack(c).resend.cross_basis = to_pair(v, l); };

  s["output.dir"] = [](RunConfig& c, std::string_view v, std::size_t) { c.output_dir = std::string(v); };
  s["scan.pairs_per_point"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.scan_pairs_per_point = to_uint(v, l); };
  return s;
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  RunConfig config;
  Pending pending;
  const auto table = setters(pending);
  std::set<std::string, std::less<>> seen;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = table.find(key);
    if (it == table.end()) fail(line_no, "unknown key '" + std::string(key) + "'");
    if (!seen.emplace(key).second) fail(line_no, "duplicate key '" + std::string(key) + "'");
    it->second(config, value, line_no);
  }

  if (pending.sigma_minus || pending.kappa_minus || pending.sigma_plus) {
    if (!pending.sigma_minus || !pending.kappa_minus) {
      throw ParseError("config: source.sigma_minus_mm and source.kappa_minus_per_mm go together");
    }
    config.experiment.widths =
        SourceWidths{*pending.sigma_minus, pending.sigma_plus.value_or(0.0), *pending.kappa_minus,
                     config.experiment.calibration.kappa_plus};
  }
  for (int side = 0; side < 2; ++side) {
    auto& optics = side == 0 ? config.experiment.optics_A : config.experiment.optics_B;
    if (pending.wavenumber[side] && pending.wavelength[side]) {
      throw ParseError(std::string("config: station_") + (side == 0 ? "A" : "B") +
                       " sets both wavenumber_per_mm and wavelength_nm");
    }
    if (pending.wavenumber[side]) optics.wavenumber_per_mm = *pending.wavenumber[side];
    if (pending.wavelength[side]) {
      if (!(*pending.wavelength[side] > 0.0)) throw ParseError("config: wavelength must be positive");
      optics.wavenumber_per_mm = 2.0 * std::numbers::pi / (*pending.wavelength[side] * 1e-6);
    }
  }
  if (config.attack && config.attack->policy == BasisPolicy::none) config.attack.reset();
  config.hash = sha256_hex(text);
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_file(path));
}

void validate(const RunConfig& config) {
  config.session.validate();
  if (config.attack) config.attack->validate();
  if (config.scan_pairs_per_point == 0) throw ValidationError("scan.pairs_per_point must be positive");
  const auto& cal = config.experiment.calibration;
  if (!(cal.units.position_scale > 0.0 && cal.units.momentum_scale > 0.0)) {
    throw ValidationError("units scales must be positive");
  }
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const RunConfig& config) {
  if (flag) return *flag;
  if (config.session_seed_set) return config.session.seed;
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    const std::string_view v(env);
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ValidationError(std::string(kSeedEnv) + " is not a non-negative integer: '" +
                            std::string(v) + "'");
    }
    return out;
  }
  return kDefaultSeed;
}

}  // namespace eprqkd::cli
