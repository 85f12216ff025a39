#pragma once

// Exponential integrator for d mu_k/dt = i omega_{k,eps} mu_k - g_k(t),
// omega_{k,eps} = omega_k + i eps:
//
//   mu^{n+1} = exp(i omega_{k,eps} dt) (mu^n - Q_k(t_n)),
//
// where Q approximates int_0^dt exp(-i omega_{k,eps} tau) g_k(t_n + tau) dtau.
// The homogeneous part is exact, so differences between two runs decay by
// exactly exp(-eps dt) and rotate by exactly omega_k dt per step.
//
// Also provides the closed-form solutions for a ship at constant speed.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "deadwater/error.hpp"
#include "deadwater/forcing.hpp"
#include "deadwater/parallel.hpp"
#include "deadwater/physics.hpp"
#include "deadwater/spectral.hpp"

namespace deadwater {

enum class QuadratureRule { Rectangle, Trapezoid, Simpson };

inline int order(QuadratureRule r) {
  switch (r) {
    case QuadratureRule::Rectangle: return 1;
    case QuadratureRule::Trapezoid: return 2;
    case QuadratureRule::Simpson: return 4;
  }
  return 0;
}

inline std::string to_string(QuadratureRule r) {
  switch (r) {
    case QuadratureRule::Rectangle: return "rectangle";
    case QuadratureRule::Trapezoid: return "trapezoid";
    case QuadratureRule::Simpson: return "simpson";
  }
  return "unknown";
}

inline QuadratureRule parse_rule(const std::string& name) {
  if (name == "rectangle") return QuadratureRule::Rectangle;
  if (name == "trapezoid") return QuadratureRule::Trapezoid;
  if (name == "simpson") return QuadratureRule::Simpson;
  throw ConfigError("rule", "unknown quadrature rule '" + name + "'");
}

struct IntegratorConfig {
  double dt = 0.5;
  QuadratureRule rule = QuadratureRule::Rectangle;
  int snapshot_every = 50;

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("dt", "time step must be positive");
    if (snapshot_every < 1) throw ConfigError("snapshot_every", "must be >= 1");
  }
};

struct SimState {
  SpectralField mu;
  double t = 0.0;
  double epsilon = 0.0;
  long step_index = 0;
};

/// exp(i omega_{s,eps} dt) = exp(i omega(s) dt) exp(-eps dt).
inline complex propagator(const PhysicalParams& params, double epsilon, double s, double dt) {
  if (dt < 0.0) throw DomainError("propagator: negative time step");
  if (epsilon < 0.0) throw DomainError("propagator: negative damping");
  return std::polar(std::exp(-epsilon * dt), omega(params, s) * dt);
}

namespace detail {

inline void check_lookahead(const ForcingModel& forcing, QuadratureRule rule, double t_end) {
  if (rule != QuadratureRule::Rectangle && t_end > forcing.horizon()) {
    throw CapabilityError(to_string(rule) + " quadrature needs the ship speed beyond the known horizon");
  }
}

inline double mode_omega(const Grid& g, const PhysicalParams& p, std::size_t k) {
  const int i = static_cast<int>(k % static_cast<std::size_t>(g.Nx));
  const int j = static_cast<int>(k / static_cast<std::size_t>(g.Nx));
  return omega(p, wavenumber_norm(g, i, j));
}

}  // namespace detail

/// Q_{k,dt}(t_k) for storage index `mode`.
inline complex quadrature(QuadratureRule rule, const ForcingModel& forcing, double epsilon,
                          std::size_t mode, double t_k, double dt) {
  if (!(dt > 0.0)) throw DomainError("quadrature: time step must be positive");
  detail::check_lookahead(forcing, rule, t_k + dt);
  const complex w(detail::mode_omega(forcing.grid(), forcing.params(), mode), epsilon);
  const complex i(0.0, 1.0);
  const complex g0 = forcing.evaluate_mode(mode, t_k);
  switch (rule) {
    case QuadratureRule::Rectangle:
      return dt * g0;
    case QuadratureRule::Trapezoid:
      return 0.5 * dt * (g0 + std::exp(-i * w * dt) * forcing.evaluate_mode(mode, t_k + dt));
    case QuadratureRule::Simpson:
      return dt / 6.0 *
             (g0 + 4.0 * std::exp(-i * w * (0.5 * dt)) * forcing.evaluate_mode(mode, t_k + 0.5 * dt) +
              std::exp(-i * w * dt) * forcing.evaluate_mode(mode, t_k + dt));
  }
  return 0.0;
}

/// Per-mode propagators for one (forcing, epsilon, rule, dt) combination.
class Stepper {
 public:
  Stepper(const ForcingModel& forcing, double epsilon, QuadratureRule rule, double dt, int threads = 1)
      : forcing_(forcing), epsilon_(epsilon), rule_(rule), threads_(threads) {
    if (epsilon < 0.0) throw DomainError("Stepper: negative damping");
    const Grid& g = forcing.grid();
    omega_.resize(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) omega_[k] = detail::mode_omega(g, forcing.params(), k);
    prepare(dt);
  }

  double dt() const noexcept { return dt_; }
  double epsilon() const noexcept { return epsilon_; }
  QuadratureRule rule() const noexcept { return rule_; }

  /// Advances `state` by `dt` (the construction step unless a shorter final step is needed).
  void advance(SimState& state, double dt) {
    if (!(dt > 0.0)) throw DomainError("Stepper: time step must be positive");
    if (dt != dt_) prepare(dt);
    const Grid& g = forcing_.grid();
    if (!(state.mu.grid == g)) throw ContractError("Stepper: state grid differs from forcing grid");
    const double t0 = state.t;
    detail::check_lookahead(forcing_, rule_, t0 + dt);

    const SpeedProfile& profile = forcing_.profile();
    const double u0 = profile.speed(t0);
    const auto ph0 = forcing_.phase_row(profile.position(t0));
    double um = 0.0;
    double u1 = 0.0;
    std::vector<complex> phm;
    std::vector<complex> ph1;
    if (rule_ != QuadratureRule::Rectangle) {
      u1 = profile.speed(t0 + dt);
      ph1 = forcing_.phase_row(profile.position(t0 + dt));
    }
    if (rule_ == QuadratureRule::Simpson) {
      um = profile.speed(t0 + 0.5 * dt);
      phm = forcing_.phase_row(profile.position(t0 + 0.5 * dt));
    }

    const auto& amp = forcing_.amplitude();
    auto& mu = state.mu.values;
    const std::size_t nx = static_cast<std::size_t>(g.Nx);
    detail::parallel_for(g.size(), threads_, [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t i = k % nx;
        const complex a = amp[k];
        complex q;
        switch (rule_) {
          case QuadratureRule::Rectangle:
            q = dt * (a * u0 * ph0[i]);
            break;
          case QuadratureRule::Trapezoid:
            q = 0.5 * dt * (a * u0 * ph0[i] + back_[k] * (a * u1 * ph1[i]));
            break;
          case QuadratureRule::Simpson:
            q = dt / 6.0 * (a * u0 * ph0[i] + 4.0 * back_half_[k] * (a * um * phm[i]) + back_[k] * (a * u1 * ph1[i]));
            break;
        }
        mu[k] = forward_[k] * (mu[k] - q);
      }
    });
    zero_nyquist(state.mu);
    state.t = t0 + dt;
    ++state.step_index;
  }

 private:
  void prepare(double dt) {
    dt_ = dt;
    const std::size_t n = omega_.size();
    forward_.resize(n);
    back_.resize(n);
    back_half_.resize(n);
    const complex i(0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      const complex w(omega_[k], epsilon_);
      forward_[k] = std::polar(std::exp(-epsilon_ * dt), omega_[k] * dt);
      if (rule_ != QuadratureRule::Rectangle) back_[k] = std::exp(-i * w * dt);
      if (rule_ == QuadratureRule::Simpson) back_half_[k] = std::exp(-i * w * (0.5 * dt));
    }
  }

  const ForcingModel& forcing_;
  double epsilon_;
  QuadratureRule rule_;
  int threads_;
  double dt_ = 0.0;
  std::vector<double> omega_;
  std::vector<complex> forward_;    // exp(i w dt)
  std::vector<complex> back_;       // exp(-i w dt)
  std::vector<complex> back_half_;  // exp(-i w dt/2)
};

/// One integrator step from `state`.
inline SimState step(const SimState& state, const IntegratorConfig& config, const ForcingModel& forcing) {
  config.validate();
  SimState next = state;
  Stepper(forcing, state.epsilon, config.rule, config.dt).advance(next, config.dt);
  return next;
}

struct Snapshot {
  double t = 0.0;
  long step = 0;
  RealField eta;
  double imaginary_residue = 0.0;
};

struct RunMetadata {
  double dt = 0.0;
  QuadratureRule rule = QuadratureRule::Rectangle;
  double epsilon = 0.0;
  long steps = 0;
  double t_final = 0.0;
  bool partial_last_step = false;
  double last_dt = 0.0;
};

struct RunResult {
  SimState final;
  std::vector<Snapshot> snapshots;
  RunMetadata metadata;
  double max_imaginary_residue = 0.0;
};

struct RunOptions {
  int threads = 1;
  bool record_snapshots = true;
};

/// Number of steps to reach t_final and the length of the last one.
inline std::pair<long, double> step_plan(double t0, double t_final, double dt) {
  const double span = t_final - t0;
  if (span < 0.0) throw DomainError("run: t_final precedes the initial time");
  if (span == 0.0) return {0, 0.0};
  const double ratio = span / dt;
  const double nearest = std::round(ratio);
  if (nearest >= 1.0 && std::abs(ratio - nearest) <= 1e-9 * nearest) return {static_cast<long>(nearest), dt};
  const long steps = static_cast<long>(std::ceil(ratio));
  return {steps, span - (steps - 1) * dt};
}

inline Snapshot make_snapshot(const SimState& s, const PhysicalParams& params) {
  auto fields = recover_eta_phi(s.mu, params, false);
  return Snapshot{s.t, s.step_index, std::move(fields.eta), fields.eta_imaginary_residue};
}

/// Integrates from `initial` to t_final, keeping eta snapshots every `snapshot_every`
/// steps (the initial state included).
inline RunResult run(const SimState& initial, const IntegratorConfig& config, const ForcingModel& forcing,
                     double t_final, const RunOptions& options = {}) {
  config.validate();
  const auto [steps, last_dt] = step_plan(initial.t, t_final, config.dt);

  RunResult result;
  result.final = initial;
  zero_nyquist(result.final.mu);
  result.metadata = RunMetadata{config.dt, config.rule, initial.epsilon, steps, t_final,
                                steps > 0 && last_dt != config.dt, last_dt};

  auto record = [&](const SimState& s) {
    if (!options.record_snapshots) return;
    Snapshot snap = make_snapshot(s, forcing.params());
    result.max_imaginary_residue = std::max(result.max_imaginary_residue, snap.imaginary_residue);
    result.snapshots.push_back(std::move(snap));
  };

  record(result.final);
  if (steps == 0) return result;

  Stepper stepper(forcing, initial.epsilon, config.rule, config.dt, options.threads);
  for (long n = 0; n < steps; ++n) {
    const double h = (n == steps - 1) ? last_dt : config.dt;
    stepper.advance(result.final, h);
    if (n == steps - 1) result.final.t = t_final;

    double norm = 0.0;
    for (const auto& c : result.final.mu.values) norm += std::abs(c.real()) + std::abs(c.imag());
    if (!std::isfinite(norm)) throw DivergenceError(result.final.step_index, "non-finite spectral field");

    if ((n + 1) % config.snapshot_every == 0) record(result.final);
  }
  return result;
}

namespace detail {

// (1 - exp(-i w)) / (i w), with a Taylor series near w = 0.
inline complex one_minus_exp_over(complex w) {
  const complex i(0.0, 1.0);
  if (std::abs(w) < 1e-3) {
    const complex x = -i * w;
    // sum_{n>=0} x^n / (n+1)!
    return 1.0 + x * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x / 120.0)));
  }
  return (1.0 - std::exp(-i * w)) / (i * w);
}

}  // namespace detail

/// Stationary response mu*_k(t) = D_k / (i (2 pi kx Ux + omega_{k,eps})) exp(-2 pi i kx Ux t).
inline SpectralField stationary_state(const PhysicalParams& params, const ShipShape& shape, double ux,
                                      double epsilon, const Grid& grid, double t) {
  if (!(epsilon > 0.0)) throw DomainError("stationary_state: damping must be positive");
  const SpectralField d = stationary_coefficient(params, shape, ux, grid);
  SpectralField out(grid);
  const complex i(0.0, 1.0);
  for (int j = 0; j < grid.rows(); ++j) {
    for (int k = 0; k < grid.Nx; ++k) {
      if (grid.is_nyquist(k, j)) continue;
      const double a = two_pi * grid.kx(k) * ux;
      const complex z(a + omega(params, wavenumber_norm(grid, k, j)), epsilon);
      out.at(k, j) = d.at(k, j) / (i * z) * std::polar(1.0, -a * t);
    }
  }
  return out;
}

/// Exact solution for constant speed from mu0 at t = 0:
///   mu_k(t) = e^{i w t} (mu0_k - D_k t (1 - e^{-i z t}) / (i z t)), z = 2 pi kx Ux + w.
/// The z -> 0 limit (eps = 0 on the singular curve) is handled by the series.
inline SpectralField constant_speed_solution(const PhysicalParams& params, const ShipShape& shape, double ux,
                                             double epsilon, const Grid& grid, const SpectralField& mu0,
                                             double t) {
  if (epsilon < 0.0) throw DomainError("constant_speed_solution: negative damping");
  if (t < 0.0) throw DomainError("constant_speed_solution: negative time");
  if (!(mu0.grid == grid)) throw ContractError("constant_speed_solution: grid mismatch");
  if (t == 0.0) return mu0;
  const SpectralField d = stationary_coefficient(params, shape, ux, grid);
  SpectralField out(grid);
  for (int j = 0; j < grid.rows(); ++j) {
    for (int k = 0; k < grid.Nx; ++k) {
      if (grid.is_nyquist(k, j)) continue;
      const double om = omega(params, wavenumber_norm(grid, k, j));
      const complex z(two_pi * grid.kx(k) * ux + om, epsilon);
      const complex evolve = std::polar(std::exp(-epsilon * t), om * t);
      out.at(k, j) = evolve * (mu0.at(k, j) - d.at(k, j) * t * detail::one_minus_exp_over(z * t));
    }
  }
  return out;
}

}  // namespace deadwater
