#pragma once

// Ship hull spectrum, speed profiles and the forcing term g_k(t) of the
// interface equation d mu_k/dt = i omega_{k,eps} mu_k - g_k(t).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "deadwater/error.hpp"
#include "deadwater/physics.hpp"
#include "deadwater/spectral.hpp"

namespace deadwater {

/// Gaussian hull f(x, y) = -T exp(-18 ((x/L1)^2 + (y/L2)^2)); the y factor is 2D only.
struct ShipShape {
  double draft = 0.02;   // T, m
  double length = 10.0;  // L1, m
  double beam = 10.0;    // L2, m

  void validate() const {
    if (!(draft > 0.0)) throw ConfigError("draft", "must be positive");
    if (!(length > 0.0)) throw ConfigError("length", "must be positive");
    if (!(beam > 0.0)) throw ConfigError("beam", "must be positive");
  }

  double height(double x, double y = 0.0, int dim = 1) const {
    const double a = x / length;
    const double b = dim == 2 ? y / beam : 0.0;
    return -draft * std::exp(-18.0 * (a * a + b * b));
  }
};

struct ConstantSpeed {
  double speed = 0.0;  // U_inf
};

/// U(t) = U_inf (1 - exp(-a t)).
struct ExponentialRamp {
  double speed = 0.0;  // U_inf
  double rate = 0.01;  // a, 1/s
};

/// Piecewise-linear U through (t_i, U_i); held at the last value after the table.
struct TabulatedSpeed {
  std::vector<double> times;
  std::vector<double> speeds;
};

class SpeedProfile {
 public:
  using Kind = std::variant<ConstantSpeed, ExponentialRamp, TabulatedSpeed>;

  SpeedProfile() : kind_(ConstantSpeed{}) {}
  SpeedProfile(ConstantSpeed c) : kind_(c) {}
  SpeedProfile(ExponentialRamp r) : kind_(r) {
    if (!(r.rate > 0.0)) throw ConfigError("rate", "ramp rate must be positive");
  }
  SpeedProfile(TabulatedSpeed table) : kind_(std::move(table)) { prepare_table(); }

  static SpeedProfile constant(double u) { return SpeedProfile(ConstantSpeed{u}); }
  static SpeedProfile ramp(double u_inf, double rate) { return SpeedProfile(ExponentialRamp{u_inf, rate}); }

  const Kind& kind() const noexcept { return kind_; }
  bool is_constant() const noexcept { return std::holds_alternative<ConstantSpeed>(kind_); }

  /// Speed along +x at time t >= 0.
  double speed(double t) const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, ConstantSpeed>) {
            return k.speed;
          } else if constexpr (std::is_same_v<K, ExponentialRamp>) {
            return -k.speed * std::expm1(-k.rate * t);
          } else {
            return table_speed(k, t);
          }
        },
        kind_);
  }

  /// Ship position X(t) = int_0^t U, X(0) = 0.
  double position(double t) const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, ConstantSpeed>) {
            return k.speed * t;
          } else if constexpr (std::is_same_v<K, ExponentialRamp>) {
            // t + (exp(-a t) - 1)/a, written to keep digits at small a t.
            return k.speed * (t + std::expm1(-k.rate * t) / k.rate);
          } else {
            return table_position(k, t);
          }
        },
        kind_);
  }

  /// Largest speed the profile reaches (U_inf for analytic kinds).
  double max_speed() const {
    return std::visit(
        [](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, TabulatedSpeed>) {
            return *std::max_element(k.speeds.begin(), k.speeds.end());
          } else {
            return k.speed;
          }
        },
        kind_);
  }

 private:
  void prepare_table() {
    auto& tab = std::get<TabulatedSpeed>(kind_);
    if (tab.times.size() != tab.speeds.size() || tab.times.empty()) {
      throw ConfigError("profile", "speed table needs matching, non-empty t and U columns");
    }
    if (tab.times.front() != 0.0) throw ConfigError("profile", "speed table must start at t = 0");
    for (std::size_t i = 1; i < tab.times.size(); ++i) {
      if (!(tab.times[i] > tab.times[i - 1])) {
        throw ConfigError("profile", "speed table times must be strictly increasing");
      }
    }
    cumulative_.assign(tab.times.size(), 0.0);
    for (std::size_t i = 1; i < tab.times.size(); ++i) {
      const double h = tab.times[i] - tab.times[i - 1];
      cumulative_[i] = cumulative_[i - 1] + 0.5 * h * (tab.speeds[i] + tab.speeds[i - 1]);
    }
  }

  static std::size_t segment(const TabulatedSpeed& k, double t) {
    const auto it = std::upper_bound(k.times.begin(), k.times.end(), t);
    return static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - k.times.begin()) - 1));
  }

  static double table_speed(const TabulatedSpeed& k, double t) {
    if (t >= k.times.back()) return k.speeds.back();
    if (t <= 0.0) return k.speeds.front();
    const std::size_t i = segment(k, t);
    const double w = (t - k.times[i]) / (k.times[i + 1] - k.times[i]);
    return k.speeds[i] + w * (k.speeds[i + 1] - k.speeds[i]);
  }

  double table_position(const TabulatedSpeed& k, double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= k.times.back()) return cumulative_.back() + k.speeds.back() * (t - k.times.back());
    const std::size_t i = segment(k, t);
    const double h = t - k.times[i];
    return cumulative_[i] + 0.5 * h * (k.speeds[i] + table_speed(k, t));
  }

  Kind kind_;
  std::vector<double> cumulative_;
};

/// Reads a two-column CSV (t_seconds, Ux_m_per_s). A non-numeric first line is a header.
inline SpeedProfile parse_speed_table(std::string_view text) {
  TabulatedSpeed tab;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t = 0.0;
    double u = 0.0;
    if (!(row >> t >> u)) {
      if (lineno == 1) continue;
      throw ConfigError("profile", "malformed speed table row " + std::to_string(lineno));
    }
    tab.times.push_back(t);
    tab.speeds.push_back(u);
  }
  return SpeedProfile(std::move(tab));
}

inline SpeedProfile load_speed_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("profile", "cannot open speed table " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_speed_table(buf.str());
}

/// Continuum Fourier transform of the hull at the grid wavenumbers:
/// 1D  -T L1 sqrt(pi/18) exp(-pi^2 L1^2 k^2 / 18), 2D times the analogous L2 factor.
inline SpectralField ship_transform(const ShipShape& shape, const Grid& grid) {
  constexpr double pi = std::numbers::pi;
  const double root = std::sqrt(pi / 18.0);
  SpectralField out(grid);
  for (int j = 0; j < grid.rows(); ++j) {
    double yfac = 1.0;
    if (grid.dim == 2) {
      const double ky = grid.ky(j);
      yfac = shape.beam * root * std::exp(-pi * pi * shape.beam * shape.beam * ky * ky / 18.0);
    }
    for (int i = 0; i < grid.Nx; ++i) {
      const double kx = grid.kx(i);
      const double xfac = shape.length * root * std::exp(-pi * pi * shape.length * shape.length * kx * kx / 18.0);
      out.at(i, j) = -shape.draft * xfac * yfac;
    }
  }
  return out;
}

/// Precomputed, time-independent part of the forcing on a grid:
///   g_k(t) = amplitude_k U(t) exp(-2 pi i kx X(t)),
///   amplitude_k = i (kx/|k|) N(|k|) f_k / |Omega|,
/// with f_k the continuum hull transform. amplitude is zero at k = 0 and on Nyquist rows.
class ForcingModel {
 public:
  ForcingModel(const PhysicalParams& params, const ShipShape& shape, SpeedProfile profile, const Grid& grid)
      : params_(params), shape_(shape), profile_(std::move(profile)), grid_(grid), amplitude_(grid.size()) {
    const SpectralField hull = ship_transform(shape, grid);
    const double inv_measure = 1.0 / grid.measure();
    for (int j = 0; j < grid.rows(); ++j) {
      for (int i = 0; i < grid.Nx; ++i) {
        if (grid.is_nyquist(i, j) || (i == 0 && j == 0)) continue;
        const double s = wavenumber_norm(grid, i, j);
        const double weight = grid.kx(i) / s * forcing_envelope(params, s);
        amplitude_[index(i, j)] = complex(0.0, weight * hull.at(i, j).real() * inv_measure);
      }
    }
  }

  const PhysicalParams& params() const noexcept { return params_; }
  const ShipShape& shape() const noexcept { return shape_; }
  const SpeedProfile& profile() const noexcept { return profile_; }
  const Grid& grid() const noexcept { return grid_; }
  const std::vector<complex>& amplitude() const noexcept { return amplitude_; }

  /// Latest time at which the speed is known; quadratures that look ahead fail past it.
  double horizon() const noexcept { return horizon_; }
  void set_horizon(double t) { horizon_ = t; }

  /// exp(-2 pi i kx X) for every x storage index.
  std::vector<complex> phase_row(double position) const {
    std::vector<complex> row(grid_.Nx);
    for (int i = 0; i < grid_.Nx; ++i) row[i] = std::polar(1.0, -two_pi * grid_.kx(i) * position);
    return row;
  }

  /// Full forcing field g(t).
  SpectralField evaluate(double t) const {
    SpectralField out(grid_);
    evaluate_into(t, out.values);
    return out;
  }

  void evaluate_into(double t, std::span<complex> out) const {
    const double u = profile_.speed(t);
    const auto phase = phase_row(profile_.position(t));
    for (int j = 0; j < grid_.rows(); ++j) {
      for (int i = 0; i < grid_.Nx; ++i) {
        const std::size_t k = index(i, j);
        out[k] = amplitude_[k] * u * phase[i];
      }
    }
  }

  /// Single coefficient g_k(t) at storage index k.
  complex evaluate_mode(std::size_t k, double t) const {
    const int i = static_cast<int>(k % static_cast<std::size_t>(grid_.Nx));
    return amplitude_[k] * profile_.speed(t) * std::polar(1.0, -two_pi * grid_.kx(i) * profile_.position(t));
  }

 private:
  std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(j) * grid_.Nx + i; }

  PhysicalParams params_;
  ShipShape shape_;
  SpeedProfile profile_;
  Grid grid_;
  std::vector<complex> amplitude_;
  double horizon_ = std::numeric_limits<double>::infinity();
};

inline SpectralField forcing_hat(const PhysicalParams& params, const ShipShape& shape,
                                 const SpeedProfile& profile, const Grid& grid, double t) {
  if (t < 0.0) throw DomainError("forcing_hat: negative time");
  return ForcingModel(params, shape, profile, grid).evaluate(t);
}

/// D_k = g_k(0) for a ship at constant speed Ux; then g_k(t) = D_k exp(-2 pi i kx Ux t).
inline SpectralField stationary_coefficient(const PhysicalParams& params, const ShipShape& shape,
                                            double ux, const Grid& grid) {
  return forcing_hat(params, shape, SpeedProfile::constant(ux), grid, 0.0);
}

}  // namespace deadwater
