// deadwater: command-line front end for the two-layer dead-water simulator.
//
//   deadwater params       --config c.json
//   deadwater steady       --config c.json [--output dir]
//   deadwater simulate     --config c.json [--output dir] [--threads n]
//   deadwater tune-epsilon --config c.json [--output dir] [--threads n]
//   deadwater convergence  --config c.json [--output dir] [--threads n]
//   deadwater spectrum     --config c.json [--output dir] [--threads n]

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "deadwater/analysis.hpp"
#include "deadwater/io.hpp"
#include "deadwater/physics.hpp"
#include "deadwater/scenario.hpp"
#include "deadwater/solver.hpp"
#include "deadwater/tuning.hpp"

namespace fs = std::filesystem;
using namespace deadwater;

namespace {

struct Options {
  std::string config;
  std::string output;
  int threads = 1;
  long seed = 0;  // reserved; the core has no randomness
};

struct Context {
  ScenarioConfig cfg;
  fs::path out;
  std::string hash;
  int threads = 1;
};

Context load(const Options& o) {
  std::ifstream in(o.config);
  if (!in) throw ConfigError("config", "cannot open " + o.config);
  std::stringstream buf;
  buf << in.rdbuf();
  Context ctx;
  ctx.cfg = parse_config(buf.str(), fs::path(o.config).parent_path());
  if (!o.output.empty()) ctx.cfg.output_dir = o.output;
  ctx.out = ctx.cfg.output_dir;
  ctx.hash = config_hash(ctx.cfg);
  if (o.threads < 1) throw ConfigError("threads", "must be >= 1");
  ctx.threads = o.threads;
  return ctx;
}

void write_config_echo(const Context& ctx) {
  json j = config_to_json(ctx.cfg);
  j["config_hash"] = ctx.hash;
  write_json(ctx.out / "config.json", j);
}

void write_trace(const Context& ctx, const std::vector<TuneIterate>& trace) {
  std::vector<double> n, eps, m;
  for (const auto& it : trace) {
    n.push_back(it.n);
    eps.push_back(it.epsilon);
    m.push_back(it.measure);
  }
  const CsvColumn cols[] = {{"n", n}, {"epsilon_per_s", eps}, {"M_m", m}};
  write_csv(ctx.out / "tune_trace.csv", cols);
}

double epsilon_for(const Context& ctx) {
  if (!ctx.cfg.epsilon_auto()) return *ctx.cfg.epsilon;
  try {
    std::optional<TuneResult> trace;
    const double eps = resolve_epsilon(ctx.cfg, ctx.threads, &trace);
    write_trace(ctx, trace->trace);
    std::printf("epsilon (auto) = %.6g 1/s after %d simulations\n", eps, trace->iterations);
    return eps;
  } catch (const TuningFailure& e) {
    write_trace(ctx, e.trace());
    throw;
  }
}

int cmd_params(const Context& ctx) {
  const auto& p = ctx.cfg.physical;
  const double u = ctx.cfg.profile.max_speed();
  std::printf("U_c = %.6f m/s\n", critical_speed(p));
  std::printf("speed = %.6f m/s\n", u);
  if (!(u > 0.0)) {
    std::printf("regime = at rest\n");
    return 0;
  }
  const WakeGeometry w = wake_geometry(p, u);
  std::printf("regime = %s\n", to_string(w.regime).c_str());
  if (w.transverse_wavenumber) std::printf("kappa_c* = %.8f cycles/m\n", *w.transverse_wavenumber);
  if (w.limit_angle) std::printf("phi* = %.6f rad\n", *w.limit_angle);
  return 0;
}

int cmd_steady(const Context& ctx) {
  const auto& c = ctx.cfg;
  if (!c.profile.is_constant()) throw ConfigError("profile", "steady needs a constant speed profile");
  const double eps = epsilon_for(ctx);
  const SpectralField mu = stationary_state(c.physical, c.ship, c.profile.speed(0.0), eps, c.grid, c.t_final);
  const Snapshot s = make_snapshot(SimState{mu, c.t_final, eps, 0}, c.physical);
  write_config_echo(ctx);
  write_eta(ctx.out / "eta_steady", s.eta, FieldMeta{c.t_final, eps, ctx.hash});
  std::printf("steady state at t = %g s written to %s (imaginary residue %.3g)\n", c.t_final,
              ctx.out.string().c_str(), s.imaginary_residue);
  return 0;
}

std::string snapshot_name(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "eta_%08ld", step);
  return buf;
}

void report_wake(const Context& ctx, const RealField& eta) {
  const auto& c = ctx.cfg;
  const double u = c.profile.speed(c.t_final);
  const double x = c.profile.position(c.t_final);
  if (!(u > 0.0)) return;
  const WakeGeometry w = wake_geometry(c.physical, u);
  json j{{"ship_x_m", x}, {"speed_m_per_s", u}, {"regime", to_string(w.regime)}};
  if (c.grid.dim == 1 && w.transverse_wavenumber) {
    try {
      const WakeWavenumber k = dominant_wake_wavenumber(eta, x, c.ship, c.wake_window);
      j["wake_wavenumber_cycles_per_m"] = k.kappa;
      j["wake_bin_cycles_per_m"] = k.bin;
      j["critical_wavenumber_cycles_per_m"] = *w.transverse_wavenumber;
      std::printf("wake wavenumber %.6f cycles/m (bin %.4f), critical %.6f\n", k.kappa, k.bin,
                  *w.transverse_wavenumber);
    } catch (const ConfigError& e) {
      j["wake_wavenumber_note"] = e.what();
    }
  }
  if (c.grid.dim == 2 && w.limit_angle) {
    const double frac = wake_cone_energy_fraction(eta, x, *w.limit_angle, c.wake_exclusion);
    j["phi_star_rad"] = *w.limit_angle;
    j["cone_leakage_fraction"] = frac;
    std::printf("energy outside the phi* cone: %.4f\n", frac);
  }
  j["config_hash"] = ctx.hash;
  write_json(ctx.out / "wake.json", j);
}

int cmd_simulate(const Context& ctx) {
  const auto& c = ctx.cfg;
  const double eps = epsilon_for(ctx);
  const ForcingModel forcing = make_forcing(c);
  const RunResult r = run(initial_state(c, eps), c.integrator, forcing, c.t_final, RunOptions{ctx.threads, true});
  write_config_echo(ctx);
  for (const auto& s : r.snapshots) {
    write_eta(ctx.out / "snapshots" / snapshot_name(s.step), s.eta, FieldMeta{s.t, eps, ctx.hash});
  }
  const Snapshot final = make_snapshot(r.final, c.physical);
  write_eta(ctx.out / "eta_final", final.eta, FieldMeta{final.t, eps, ctx.hash});
  json meta = metadata_json(r.metadata, ctx.hash);
  meta["snapshots"] = r.snapshots.size();
  meta["max_imaginary_residue"] = std::max(r.max_imaginary_residue, final.imaginary_residue);
  write_json(ctx.out / "run.json", meta);
  std::printf("%ld steps to t = %g s, %zu snapshots, max imaginary residue %.3g\n", r.metadata.steps, c.t_final,
              r.snapshots.size(), meta["max_imaginary_residue"].get<double>());
  if (c.t_final > 0.0) report_wake(ctx, final.eta);
  return 0;
}

int cmd_tune(const Context& ctx) {
  if (!ctx.cfg.tuning) throw ConfigError("tuning", "tune-epsilon needs a tuning block");
  try {
    const TuneResult t = tune_scenario(ctx.cfg, ctx.threads);
    write_trace(ctx, t.trace);
    write_config_echo(ctx);
    std::printf("epsilon* = %.6g 1/s after %d simulations (M = %.3g m)\n", t.epsilon_star, t.iterations,
                t.trace.back().measure);
    return 0;
  } catch (const TuningFailure& e) {
    write_trace(ctx, e.trace());
    throw;
  }
}

int cmd_convergence(const Context& ctx) {
  const double eps = epsilon_for(ctx);
  const ConvergenceReport rep = convergence_sweep(ctx.cfg, eps, ctx.threads);
  std::vector<double> dt, err;
  for (const auto& s : rep.samples) {
    dt.push_back(s.dt);
    err.push_back(s.error);
    std::printf("dt = %-8g relative l2 error = %.6e\n", s.dt, s.error);
  }
  const CsvColumn cols[] = {{"dt_s", dt}, {"relative_l2_error", err}};
  write_csv(ctx.out / "convergence.csv", cols);
  write_json(ctx.out / "convergence.json", {{"order", rep.fit.slope},
                                           {"intercept", rep.fit.intercept},
                                           {"residual", rep.fit.residual},
                                           {"rule", to_string(ctx.cfg.integrator.rule)},
                                           {"epsilon", eps},
                                           {"config_hash", ctx.hash}});
  write_config_echo(ctx);
  std::printf("fitted order (%s) = %.5f\n", to_string(ctx.cfg.integrator.rule).c_str(), rep.fit.slope);
  return 0;
}

int cmd_spectrum(const Context& ctx) {
  const auto& c = ctx.cfg;
  if (c.grid.dim != 1) throw ConfigError("grid.dim", "spectrum works on 1D scenarios");
  const double eps = epsilon_for(ctx);
  IntegratorConfig ic = c.integrator;
  ic.snapshot_every = c.spectrum.snapshot_every;
  const RunResult r = run(initial_state(c, eps), ic, make_forcing(c), c.t_final, RunOptions{ctx.threads, true});
  std::vector<RealField> fields;
  std::vector<double> times;
  for (const auto& s : r.snapshots) {
    fields.push_back(s.eta);
    times.push_back(s.t);
  }
  const double u_inf = c.profile.max_speed();
  const SpacetimeSpectrum S = spacetime_spectrum(fields, times, c.physical, u_inf);

  std::vector<double> kap, freq, mag, ok, disp, line;
  for (std::size_t k = 0; k < S.kappa.size(); ++k) {
    if (std::abs(S.kappa[k]) > c.spectrum.kappa_max) continue;
    ok.push_back(S.kappa[k]);
    disp.push_back(S.dispersion_overlay[k]);
    line.push_back(S.ship_overlay[k]);
    for (std::size_t f = 0; f < S.frequency.size(); ++f) {
      kap.push_back(S.kappa[k]);
      freq.push_back(S.frequency[f]);
      mag.push_back(S.at(f, k));
    }
  }
  const CsvColumn spec_cols[] = {{"kappa_cycles_per_m", kap}, {"frequency_hz", freq}, {"magnitude_m", mag}};
  write_csv(ctx.out / "spectrum.csv", spec_cols);
  const CsvColumn overlay_cols[] = {{"kappa_cycles_per_m", ok}, {"dispersion_hz", disp}, {"ship_line_hz", line}};
  write_csv(ctx.out / "overlays.csv", overlay_cols);

  const SpectralRidge ridge = spectral_ridge(S, c.spectrum.relative_floor, c.spectrum.kappa_max);
  std::vector<double> branch;
  for (auto b : ridge.branch) branch.push_back(b == RidgeBranch::ShipLine ? 0.0 : 1.0);
  const CsvColumn ridge_cols[] = {
      {"kappa_cycles_per_m", ridge.kappa}, {"ridge_hz", ridge.frequency}, {"branch_0line_1dispersion", branch}};
  write_csv(ctx.out / "ridge.csv", ridge_cols);

  const double blind = overlay_blind_radius(S, 0.0);
  json j{{"crossings_cycles_per_m", ridge.crossings},
         {"blind_radius_at_zero", blind},
         {"kappa_bin", S.kappa_bin()},
         {"frequency_bin_hz", S.frequency_bin()},
         {"snapshots", times.size()},
         {"max_imaginary_residue", r.max_imaginary_residue},
         {"config_hash", ctx.hash}};
  if (auto kc = critical_wavenumber(c.physical, u_inf)) j["critical_wavenumber_cycles_per_m"] = *kc;
  write_json(ctx.out / "spectrum.json", j);
  write_config_echo(ctx);

  std::printf("%zu snapshots, kappa bin %.4g, frequency bin %.4g Hz\n", times.size(), S.kappa_bin(),
              S.frequency_bin());
  std::printf("ridge crosses the ship line at:");
  for (double x : ridge.crossings) std::printf(" %.5f", x);
  std::printf("\n(|kappa| <= %.4f is unresolved around 0)\n", blind);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-layer dead-water internal wave simulator"};
  app.require_subcommand(1);
  Options opt;

  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const Context&);
  };
  const Entry entries[] = {
      {"params", "Critical speed, regime and wake geometry for the configured speed", cmd_params},
      {"steady", "Stationary interface for a ship at constant speed", cmd_steady},
      {"simulate", "Time-step the scenario and write eta snapshots", cmd_simulate},
      {"tune-epsilon", "Geometric search for the smallest damping that removes wrap-around oscillations",
       cmd_tune},
      {"convergence", "Dyadic dt sweep against the constant-speed closed form", cmd_convergence},
      {"spectrum", "Space-time Fourier analysis of a 1D run", cmd_spectrum},
  };
  std::vector<std::pair<CLI::App*, int (*)(const Context&)>> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", opt.config, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", opt.output, "Output directory (overrides output_dir)");
    sub->add_option("--threads", opt.threads, "Worker threads for the time stepper")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "Reserved; the simulator is deterministic");
    subs.emplace_back(sub, e.fn);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    for (auto& [sub, fn] : subs) {
      if (sub->parsed()) return fn(load(opt));
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
