#pragma once

// Dispersion relation of interfacial waves between two fluid layers, derived
// velocities and the wake geometry of a ship moving along +x.
//
// Wavenumbers are in cycles per metre throughout; every 2*pi factor is explicit.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "deadwater/error.hpp"

namespace deadwater {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct PhysicalParams {
  double rho1 = 999.0;   // top layer density, kg/m^3
  double rho2 = 1022.3;  // bottom layer density, kg/m^3
  double h1 = 1.0;       // top layer depth, m
  double h2 = 6.0;       // bottom layer depth, m
  double g = 9.81;       // gravity, m/s^2

  // Reduced gravity times density jump: (rho2 - rho1) g.
  double buoyancy() const noexcept { return (rho2 - rho1) * g; }

  void validate() const {
    if (!(rho1 > 0.0) || !(rho1 < rho2)) {
      throw ConfigError("rho1", "densities must satisfy 0 < rho1 < rho2");
    }
    if (!(h1 > 0.0)) throw ConfigError("h1", "layer depth must be positive");
    if (!(h2 > 0.0)) throw ConfigError("h2", "layer depth must be positive");
    if (!(g > 0.0)) throw ConfigError("g", "gravity must be positive");
  }
};

namespace detail {

// coth(x) for x > 0, series below 1e-4 where 1/tanh loses digits to the 1/x pole.
inline double coth(double x) {
  if (x < 1e-4) {
    const double x2 = x * x;
    return 1.0 / x + x / 3.0 - x * x2 / 45.0;
  }
  if (x > 20.0) return 1.0;
  return 1.0 / std::tanh(x);
}

// E(sigma) = sigma * coth(sigma), continuously extended by E(0) = 1.
inline double sigma_coth(double sigma) {
  if (sigma < 1e-4) {
    const double s2 = sigma * sigma;
    return 1.0 + s2 / 3.0 - s2 * s2 / 45.0;
  }
  if (sigma > 20.0) return sigma;
  return sigma / std::tanh(sigma);
}

// 1/sinh(x) for x > 0 without overflow at large x.
inline double inv_sinh(double x) {
  if (x < 1.0) return 1.0 / std::sinh(x);
  return 2.0 * std::exp(-x) / (-std::expm1(-2.0 * x));
}

}  // namespace detail

enum class Layer { Top = 1, Bottom = 2 };

/// T_j(s) = rho_j coth(2 pi s h_j). Diverges at s = 0, so s must be positive.
inline double layer_coth(const PhysicalParams& p, double s, Layer layer) {
  if (!(s > 0.0)) throw DomainError("layer_coth: wavenumber must be positive");
  const double rho = layer == Layer::Top ? p.rho1 : p.rho2;
  const double h = layer == Layer::Top ? p.h1 : p.h2;
  return rho * detail::coth(two_pi * s * h);
}

/// R(s) = 2 pi s (T_1 + T_2) = rho1/h1 E(2 pi s h1) + rho2/h2 E(2 pi s h2).
/// Finite and strictly increasing on [0, inf) with R(0) = rho1/h1 + rho2/h2.
inline double dispersion_sum(const PhysicalParams& p, double s) {
  if (s < 0.0) throw DomainError("dispersion_sum: negative wavenumber");
  return p.rho1 / p.h1 * detail::sigma_coth(two_pi * s * p.h1) +
         p.rho2 / p.h2 * detail::sigma_coth(two_pi * s * p.h2);
}

inline double critical_speed(const PhysicalParams& p) {
  return std::sqrt(p.buoyancy() / (p.rho1 / p.h1 + p.rho2 / p.h2));
}

/// v_p(s) = omega(s) / (2 pi s). Strictly decreasing from U_c (s -> 0) to 0.
inline double phase_velocity(const PhysicalParams& p, double s) {
  if (!(s > 0.0)) throw DomainError("phase_velocity: wavenumber must be positive");
  return std::sqrt(p.buoyancy() / dispersion_sum(p, s));
}

/// Angular frequency omega(s) = sqrt(2 pi s (rho2 - rho1) g / (T_1 + T_2)), omega(0) = 0.
inline double omega(const PhysicalParams& p, double s) {
  if (s < 0.0) throw DomainError("omega: negative wavenumber");
  if (s == 0.0) return 0.0;
  return two_pi * s * std::sqrt(p.buoyancy() / dispersion_sum(p, s));
}

/// Bound N(s) on the ship forcing: |g_k| <= N(|k|) |U| |f_k|.
inline double forcing_envelope(const PhysicalParams& p, double s) {
  if (!(s > 0.0)) throw DomainError("forcing_envelope: wavenumber must be positive");
  const double k = two_pi * s;
  return k * k * p.rho1 * detail::inv_sinh(k * p.h1) / dispersion_sum(p, s);
}

/// alpha(s) = sqrt(2 pi s / ((T_1 + T_2)(rho2 - rho1) g)) = omega / ((rho2 - rho1) g).
inline double potential_weight(const PhysicalParams& p, double s) {
  return omega(p, s) / p.buoyancy();
}

/// Wavenumber s* > 0 of the wave whose phase velocity equals Ux, if Ux < U_c.
/// Bisection on the strictly decreasing phase velocity.
inline std::optional<double> critical_wavenumber(const PhysicalParams& p, double ux,
                                                 double tol = 1e-12) {
  if (!(ux > 0.0)) throw DomainError("critical_wavenumber: speed must be positive");
  if (!(tol > 0.0)) throw DomainError("critical_wavenumber: tolerance must be positive");
  if (ux >= critical_speed(p)) return std::nullopt;

  // Geometric bracket search from 1 cycle/m.
  double lo = 1.0;
  double hi = 1.0;
  int expansions = 0;
  if (phase_velocity(p, 1.0) > ux) {
    while (phase_velocity(p, hi) > ux) {
      lo = hi;
      hi *= 2.0;
      if (++expansions > 2000) throw NumericalError("critical_wavenumber: no upper bracket");
    }
  } else {
    while (phase_velocity(p, lo) <= ux) {
      hi = lo;
      lo *= 0.5;
      if (++expansions > 2000) throw NumericalError("critical_wavenumber: no lower bracket");
    }
  }

  // Shrink the bracket to machine precision so the root is accurate in s, not
  // only in v_p (v_p is nearly flat at small s).
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (phase_velocity(p, mid) > ux) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double root = 0.5 * (lo + hi);
  if (std::abs(phase_velocity(p, root) - ux) <= tol * ux) return root;
  throw NumericalError("critical_wavenumber: bisection did not converge");
}

/// Polar angle theta(r) of the singularity curve 2 pi kx Ux = omega(k) at |k| = r.
/// Empty when v_p(r) > Ux (no stationary wave of that length); ratios within a few
/// ulps of 1 count as the transverse wave r = r*.
inline std::optional<double> singularity_angle(const PhysicalParams& p, double ux, double r) {
  if (!(r > 0.0)) throw DomainError("singularity_angle: radius must be positive");
  if (!(ux > 0.0)) throw DomainError("singularity_angle: speed must be positive");
  const double ratio = phase_velocity(p, r) / ux;
  if (ratio > 1.0 + 1e-12) return std::nullopt;
  return std::acos(std::min(ratio, 1.0));
}

enum class Regime { Subcritical, Supercritical, Critical };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Supercritical: return "supercritical";
    case Regime::Critical: return "critical";
  }
  return "unknown";
}

struct WakeGeometry {
  Regime regime = Regime::Critical;
  std::optional<double> transverse_wavenumber;  // r*, subcritical only
  std::optional<double> limit_angle;            // phi*, supercritical only
};

/// Classifies the ship speed against U_c and returns r* or the cone half-angle phi*.
inline WakeGeometry wake_geometry(const PhysicalParams& p, double ux) {
  if (!(ux > 0.0)) throw DomainError("wake_geometry: speed must be positive");
  const double uc = critical_speed(p);
  WakeGeometry w;
  if (ux < uc) {
    w.regime = Regime::Subcritical;
    w.transverse_wavenumber = critical_wavenumber(p, ux);
  } else if (ux > uc) {
    w.regime = Regime::Supercritical;
    w.limit_angle = std::asin(uc / ux);
  }
  return w;
}

}  // namespace deadwater
