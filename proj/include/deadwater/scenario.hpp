#pragma once

// Scenario configuration (JSON) and the pipelines shared by the command-line
// tool and the tests: forcing, initial state, damping selection, dt sweeps.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "json.hpp"

#include "deadwater/analysis.hpp"
#include "deadwater/error.hpp"
#include "deadwater/forcing.hpp"
#include "deadwater/physics.hpp"
#include "deadwater/solver.hpp"
#include "deadwater/spectral.hpp"
#include "deadwater/tuning.hpp"

namespace deadwater {

using json = nlohmann::json;

enum class InitialState { Zero, Steady };

inline const char* to_string(InitialState s) { return s == InitialState::Zero ? "zero" : "steady"; }

/// dt_i = dt0 / 2^i for i < levels.
struct ConvergenceConfig {
  double dt0 = 4.0;
  int levels = 4;
};

struct SpectrumConfig {
  int snapshot_every = 4;
  double relative_floor = 1e-3;
  double kappa_max = std::numeric_limits<double>::infinity();
};

struct ScenarioConfig {
  PhysicalParams physical;
  Grid grid;
  ShipShape ship;
  SpeedProfile profile;
  std::optional<double> epsilon;  // empty means "auto"
  std::optional<TuneConfig> tuning;
  IntegratorConfig integrator;
  InitialState initial = InitialState::Zero;
  double t_final = 0.0;
  std::string output_dir = "out";
  ConvergenceConfig convergence;
  SpectrumConfig spectrum;
  double wake_window = 50.0;     // m, segment behind the ship for the wake wavenumber
  double wake_exclusion = 50.0;  // m, near field left out of the 2D cone fraction

  bool epsilon_auto() const noexcept { return !epsilon.has_value(); }
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> known) {
  const std::set<std::string> names(known.begin(), known.end());
  for (const auto& [key, value] : obj.items()) {
    if (!names.count(key)) throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
  }
}

inline const json& require(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError(where.empty() ? key : where + "." + key, "missing required key");
  return obj.at(key);
}

template <typename T>
T read(const json& obj, const std::string& where, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where.empty() ? key : where + "." + key, "wrong value type");
  }
}

template <typename T>
T read_required(const json& obj, const std::string& where, const char* key) {
  const json& v = require(obj, where, key);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where.empty() ? key : where + "." + key, "wrong value type");
  }
}

inline const json& section(const json& doc, const char* key, bool required) {
  static const json empty = json::object();
  if (!doc.contains(key)) {
    if (required) throw ConfigError(key, "missing required section");
    return empty;
  }
  if (!doc.at(key).is_object()) throw ConfigError(key, "expected an object");
  return doc.at(key);
}

// Re-throws a component validation error with the section name prefixed.
template <typename Fn>
void validate_in(const std::string& where, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    const std::string prefix = e.key() + ": ";
    std::string message = e.what();
    if (message.rfind(prefix, 0) == 0) message = message.substr(prefix.size());
    throw ConfigError(where + "." + e.key(), message);
  }
}

inline SpeedProfile parse_profile(const json& p, const std::filesystem::path& base_dir) {
  const auto kind = read_required<std::string>(p, "profile", "kind");
  if (kind == "constant") {
    reject_unknown(p, "profile", {"kind", "speed"});
    return SpeedProfile::constant(read_required<double>(p, "profile", "speed"));
  }
  if (kind == "ramp") {
    reject_unknown(p, "profile", {"kind", "speed", "rate"});
    const double rate = read<double>(p, "profile", "rate", 0.01);
    if (!(rate > 0.0)) throw ConfigError("profile.rate", "ramp rate must be positive");
    return SpeedProfile::ramp(read_required<double>(p, "profile", "speed"), rate);
  }
  if (kind == "table") {
    reject_unknown(p, "profile", {"kind", "path", "t", "U"});
    if (p.contains("path")) {
      std::filesystem::path path = read_required<std::string>(p, "profile", "path");
      if (path.is_relative()) path = base_dir / path;
      return load_speed_table(path.string());
    }
    TabulatedSpeed tab{read_required<std::vector<double>>(p, "profile", "t"),
                       read_required<std::vector<double>>(p, "profile", "U")};
    return SpeedProfile(std::move(tab));
  }
  throw ConfigError("profile.kind", "expected constant, ramp or table, got '" + kind + "'");
}

inline json profile_to_json(const SpeedProfile& profile) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ConstantSpeed>) {
          return {{"kind", "constant"}, {"speed", k.speed}};
        } else if constexpr (std::is_same_v<K, ExponentialRamp>) {
          return {{"kind", "ramp"}, {"speed", k.speed}, {"rate", k.rate}};
        } else {
          return {{"kind", "table"}, {"t", k.times}, {"U", k.speeds}};
        }
      },
      profile.kind());
}

}  // namespace detail

/// Parses and validates a scenario. Relative table paths resolve against base_dir.
inline ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {}) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  detail::reject_unknown(doc, "", {"physical", "grid", "ship", "profile", "epsilon", "tuning", "integrator",
                                   "initial", "t_final", "output_dir", "convergence", "spectrum", "wake"});

  ScenarioConfig cfg;

  const json& phys = detail::section(doc, "physical", false);
  detail::reject_unknown(phys, "physical", {"rho1", "rho2", "h1", "h2", "g"});
  cfg.physical.rho1 = detail::read(phys, "physical", "rho1", cfg.physical.rho1);
  cfg.physical.rho2 = detail::read(phys, "physical", "rho2", cfg.physical.rho2);
  cfg.physical.h1 = detail::read(phys, "physical", "h1", cfg.physical.h1);
  cfg.physical.h2 = detail::read(phys, "physical", "h2", cfg.physical.h2);
  cfg.physical.g = detail::read(phys, "physical", "g", cfg.physical.g);
  detail::validate_in("physical", [&] { cfg.physical.validate(); });

  const json& grid = detail::section(doc, "grid", true);
  detail::reject_unknown(grid, "grid", {"dim", "Lx", "Nx", "Ly", "Ny"});
  cfg.grid.dim = detail::read(grid, "grid", "dim", 1);
  cfg.grid.Lx = detail::read_required<double>(grid, "grid", "Lx");
  cfg.grid.Nx = detail::read_required<int>(grid, "grid", "Nx");
  if (cfg.grid.dim == 2) {
    cfg.grid.Ly = detail::read_required<double>(grid, "grid", "Ly");
    cfg.grid.Ny = detail::read_required<int>(grid, "grid", "Ny");
  } else {
    cfg.grid.Ly = detail::read(grid, "grid", "Ly", 0.0);
    cfg.grid.Ny = detail::read(grid, "grid", "Ny", 1);
  }
  detail::validate_in("grid", [&] { cfg.grid.validate(); });

  const json& ship = detail::section(doc, "ship", false);
  detail::reject_unknown(ship, "ship", {"draft", "length", "beam"});
  cfg.ship.draft = detail::read(ship, "ship", "draft", cfg.ship.draft);
  cfg.ship.length = detail::read(ship, "ship", "length", cfg.ship.length);
  cfg.ship.beam = detail::read(ship, "ship", "beam", cfg.ship.beam);
  detail::validate_in("ship", [&] { cfg.ship.validate(); });

  try {
    cfg.profile = detail::parse_profile(detail::section(doc, "profile", true), base_dir);
  } catch (const ConfigError& e) {
    if (e.key().rfind("profile", 0) == 0) throw;
    throw ConfigError("profile", e.what());
  }
  if (!(cfg.profile.max_speed() >= 0.0)) throw ConfigError("profile.speed", "speed must be non-negative");

  const json& eps = detail::require(doc, "", "epsilon");
  if (eps.is_string()) {
    if (eps.get<std::string>() != "auto") throw ConfigError("epsilon", "expected a number or \"auto\"");
  } else if (eps.is_number()) {
    cfg.epsilon = eps.get<double>();
    if (!(*cfg.epsilon >= 0.0)) throw ConfigError("epsilon", "damping must be non-negative");
  } else {
    throw ConfigError("epsilon", "expected a number or \"auto\"");
  }

  if (doc.contains("tuning")) {
    const json& t = detail::section(doc, "tuning", true);
    detail::reject_unknown(t, "tuning", {"epsilon0", "delta", "gamma", "max_iter", "front_window", "measure"});
    TuneConfig tc;
    tc.epsilon0 = detail::read(t, "tuning", "epsilon0", tc.epsilon0);
    tc.delta = detail::read(t, "tuning", "delta", tc.delta);
    tc.gamma = detail::read(t, "tuning", "gamma", tc.gamma);
    tc.max_iter = detail::read(t, "tuning", "max_iter", tc.max_iter);
    tc.front_window = detail::read(t, "tuning", "front_window", tc.front_window);
    if (t.contains("measure")) {
      detail::validate_in("tuning", [&] { tc.measure = parse_measure(detail::read<std::string>(t, "tuning", "measure", "")); });
    }
    detail::validate_in("tuning", [&] { tc.validate(); });
    cfg.tuning = tc;
  }
  if (cfg.epsilon_auto() && !cfg.tuning) throw ConfigError("tuning", "epsilon = \"auto\" requires a tuning block");

  const json& integ = detail::section(doc, "integrator", false);
  detail::reject_unknown(integ, "integrator", {"dt", "rule", "snapshot_every"});
  cfg.integrator.dt = detail::read(integ, "integrator", "dt", cfg.integrator.dt);
  if (integ.contains("rule")) {
    detail::validate_in("integrator",
                        [&] { cfg.integrator.rule = parse_rule(detail::read<std::string>(integ, "integrator", "rule", "")); });
  }
  cfg.integrator.snapshot_every = detail::read(integ, "integrator", "snapshot_every", cfg.integrator.snapshot_every);
  detail::validate_in("integrator", [&] { cfg.integrator.validate(); });

  const auto initial = detail::read<std::string>(doc, "", "initial", "zero");
  if (initial == "zero") {
    cfg.initial = InitialState::Zero;
  } else if (initial == "steady") {
    cfg.initial = InitialState::Steady;
    if (!cfg.profile.is_constant()) throw ConfigError("initial", "steady start needs a constant speed profile");
    if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw ConfigError("initial", "steady start needs epsilon > 0");
  } else {
    throw ConfigError("initial", "expected zero or steady, got '" + initial + "'");
  }

  cfg.t_final = detail::read_required<double>(doc, "", "t_final");
  if (!(cfg.t_final >= 0.0)) throw ConfigError("t_final", "must be non-negative");
  cfg.output_dir = detail::read<std::string>(doc, "", "output_dir", cfg.output_dir);

  const json& conv = detail::section(doc, "convergence", false);
  detail::reject_unknown(conv, "convergence", {"dt0", "levels"});
  cfg.convergence.dt0 = detail::read(conv, "convergence", "dt0", cfg.convergence.dt0);
  cfg.convergence.levels = detail::read(conv, "convergence", "levels", cfg.convergence.levels);
  if (!(cfg.convergence.dt0 > 0.0)) throw ConfigError("convergence.dt0", "must be positive");
  if (cfg.convergence.levels < 3) throw ConfigError("convergence.levels", "need at least 3 time steps");

  const json& spec = detail::section(doc, "spectrum", false);
  detail::reject_unknown(spec, "spectrum", {"snapshot_every", "relative_floor", "kappa_max"});
  cfg.spectrum.snapshot_every = detail::read(spec, "spectrum", "snapshot_every", cfg.spectrum.snapshot_every);
  cfg.spectrum.relative_floor = detail::read(spec, "spectrum", "relative_floor", cfg.spectrum.relative_floor);
  cfg.spectrum.kappa_max = detail::read(spec, "spectrum", "kappa_max", cfg.spectrum.kappa_max);
  if (cfg.spectrum.snapshot_every < 1) throw ConfigError("spectrum.snapshot_every", "must be >= 1");
  if (!(cfg.spectrum.relative_floor >= 0.0)) throw ConfigError("spectrum.relative_floor", "must be non-negative");
  if (!(cfg.spectrum.kappa_max > 0.0)) throw ConfigError("spectrum.kappa_max", "must be positive");

  const json& wake = detail::section(doc, "wake", false);
  detail::reject_unknown(wake, "wake", {"window", "exclusion"});
  cfg.wake_window = detail::read(wake, "wake", "window", cfg.wake_window);
  cfg.wake_exclusion = detail::read(wake, "wake", "exclusion", cfg.wake_exclusion);
  if (!(cfg.wake_window > 0.0)) throw ConfigError("wake.window", "must be positive");
  if (!(cfg.wake_exclusion >= 0.0)) throw ConfigError("wake.exclusion", "must be non-negative");
  return cfg;
}

/// Canonical JSON of a parsed config, defaults filled in. Keys are sorted, so the
/// dump is a stable input for the config hash.
inline json config_to_json(const ScenarioConfig& c) {
  json j;
  j["physical"] = {{"rho1", c.physical.rho1}, {"rho2", c.physical.rho2}, {"h1", c.physical.h1},
                   {"h2", c.physical.h2}, {"g", c.physical.g}};
  j["grid"] = {{"dim", c.grid.dim}, {"Lx", c.grid.Lx}, {"Nx", c.grid.Nx}, {"Ly", c.grid.Ly}, {"Ny", c.grid.Ny}};
  j["ship"] = {{"draft", c.ship.draft}, {"length", c.ship.length}, {"beam", c.ship.beam}};
  j["profile"] = detail::profile_to_json(c.profile);
  j["epsilon"] = c.epsilon ? json(*c.epsilon) : json("auto");
  if (c.tuning) {
    j["tuning"] = {{"epsilon0", c.tuning->epsilon0}, {"delta", c.tuning->delta},   {"gamma", c.tuning->gamma},
                   {"max_iter", c.tuning->max_iter}, {"front_window", c.tuning->front_window},
                   {"measure", to_string(c.tuning->measure)}};
  }
  j["integrator"] = {{"dt", c.integrator.dt},
                     {"rule", to_string(c.integrator.rule)},
                     {"snapshot_every", c.integrator.snapshot_every}};
  j["initial"] = to_string(c.initial);
  j["t_final"] = c.t_final;
  j["output_dir"] = c.output_dir;
  j["convergence"] = {{"dt0", c.convergence.dt0}, {"levels", c.convergence.levels}};
  j["spectrum"] = {{"snapshot_every", c.spectrum.snapshot_every}, {"relative_floor", c.spectrum.relative_floor}};
  if (std::isfinite(c.spectrum.kappa_max)) j["spectrum"]["kappa_max"] = c.spectrum.kappa_max;
  j["wake"] = {{"window", c.wake_window}, {"exclusion", c.wake_exclusion}};
  return j;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Hash of the canonical config, excluding output_dir so relocating output keeps it.
inline std::string config_hash(const ScenarioConfig& c) {
  json j = config_to_json(c);
  j.erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

inline ForcingModel make_forcing(const ScenarioConfig& c) { return ForcingModel(c.physical, c.ship, c.profile, c.grid); }

/// mu at t = 0: zero, or the stationary response of a ship at constant speed.
inline SimState initial_state(const ScenarioConfig& c, double epsilon) {
  SimState s{SpectralField(c.grid), 0.0, epsilon, 0};
  if (c.initial == InitialState::Steady) {
    if (!c.profile.is_constant()) throw ConfigError("initial", "steady start needs a constant speed profile");
    s.mu = stationary_state(c.physical, c.ship, c.profile.speed(0.0), epsilon, c.grid, 0.0);
  }
  return s;
}

/// Runs the scenario to t_final at damping epsilon and measures the oscillation ahead of the ship.
inline double scenario_oscillation(const ScenarioConfig& c, const ForcingModel& forcing, double epsilon,
                                   const TuneConfig& tc, int threads = 1) {
  const RunResult r = run(initial_state(c, epsilon), c.integrator, forcing, c.t_final, RunOptions{threads, false});
  const Snapshot final = make_snapshot(r.final, c.physical);
  return oscillation_measure(final.eta, c.profile.position(c.t_final), c.ship, tc.front_window, tc.measure);
}

inline TuneResult tune_scenario(const ScenarioConfig& c, int threads = 1) {
  if (!c.tuning) throw ConfigError("tuning", "no tuning block in config");
  const ForcingModel forcing = make_forcing(c);
  return tune_epsilon(*c.tuning, [&](double eps) { return scenario_oscillation(c, forcing, eps, *c.tuning, threads); });
}

/// Configured damping, or the tuner's choice when epsilon = "auto".
inline double resolve_epsilon(const ScenarioConfig& c, int threads = 1, std::optional<TuneResult>* trace = nullptr) {
  if (c.epsilon) return *c.epsilon;
  TuneResult t = tune_scenario(c, threads);
  const double eps = t.epsilon_star;
  if (trace) *trace = std::move(t);
  return eps;
}

struct ConvergenceReport {
  std::vector<ErrorSample> samples;
  OrderFit fit;
  double max_imaginary_residue = 0.0;
};

/// Dyadic dt sweep at constant speed against the closed-form solution at t_final.
inline ConvergenceReport convergence_sweep(const ScenarioConfig& c, double epsilon, int threads = 1) {
  if (!c.profile.is_constant()) throw ConfigError("profile", "convergence sweep needs a constant speed profile");
  const ForcingModel forcing = make_forcing(c);
  const SimState start = initial_state(c, epsilon);
  const double ux = c.profile.speed(0.0);
  const SpectralField exact_mu =
      constant_speed_solution(c.physical, c.ship, ux, epsilon, c.grid, start.mu, c.t_final);
  const RealField exact = make_snapshot(SimState{exact_mu, c.t_final, epsilon, 0}, c.physical).eta;

  ConvergenceReport report;
  for (int level = 0; level < c.convergence.levels; ++level) {
    IntegratorConfig ic = c.integrator;
    ic.dt = c.convergence.dt0 / std::ldexp(1.0, level);
    const RunResult r = run(start, ic, forcing, c.t_final, RunOptions{threads, true});
    report.max_imaginary_residue = std::max(report.max_imaginary_residue, r.max_imaginary_residue);
    const Snapshot final = make_snapshot(r.final, c.physical);
    report.max_imaginary_residue = std::max(report.max_imaginary_residue, final.imaginary_residue);
    report.samples.push_back({ic.dt, relative_l2_error(final.eta, exact)});
  }
  report.fit = convergence_order(report.samples);
  return report;
}

}  // namespace deadwater
