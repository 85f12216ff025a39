#pragma once

// Geometric search for the smallest Rayleigh damping that suppresses the
// wrap-around oscillations ahead of the ship.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "deadwater/analysis.hpp"
#include "deadwater/error.hpp"
#include "deadwater/forcing.hpp"
#include "deadwater/spectral.hpp"

namespace deadwater {

/// FirstExtrema: |eta(x_max) - eta(x_min)| at the first local maximum and first local
/// minimum met when walking away from the ship; 0 when either is missing.
/// GlobalRange: max eta - min eta over the whole window.
enum class OscillationMeasure { FirstExtrema, GlobalRange };

inline const char* to_string(OscillationMeasure m) {
  return m == OscillationMeasure::FirstExtrema ? "first-extrema" : "range";
}

inline OscillationMeasure parse_measure(const std::string& name) {
  if (name == "first-extrema") return OscillationMeasure::FirstExtrema;
  if (name == "range") return OscillationMeasure::GlobalRange;
  throw ConfigError("measure", "expected first-extrema or range, got '" + name + "'");
}

struct TuneConfig {
  double epsilon0 = 1e-8;
  double delta = 1e-7;  // m
  double gamma = 1.1;
  int max_iter = 200;
  double front_window = 0.9;
  OscillationMeasure measure = OscillationMeasure::FirstExtrema;

  void validate() const {
    if (!(epsilon0 > 0.0)) throw ConfigError("epsilon0", "must be positive");
    if (!(delta > 0.0)) throw ConfigError("delta", "must be positive");
    if (!(gamma > 1.0)) throw ConfigError("gamma", "must exceed 1");
    if (max_iter < 1) throw ConfigError("max_iter", "must be >= 1");
    if (!(front_window > 0.0) || front_window > 1.0) throw ConfigError("front_window", "must lie in (0, 1]");
  }
};

struct TuneIterate {
  int n = 0;
  double epsilon = 0.0;
  double measure = 0.0;
};

struct TuneResult {
  double epsilon_star = 0.0;
  int iterations = 0;
  std::vector<TuneIterate> trace;
};

class TuningFailure : public Error {
 public:
  TuningFailure(const std::string& message, std::vector<TuneIterate> trace)
      : Error(message), trace_(std::move(trace)) {}
  const std::vector<TuneIterate>& trace() const noexcept { return trace_; }

 private:
  std::vector<TuneIterate> trace_;
};

/// Oscillation size over the periodic window x in (ship_x + 2 L1, ship_x + front_window Lx/2),
/// scanned away from the ship. 2D fields are measured on the centreline y = 0.
inline double oscillation_measure(const RealField& eta, double ship_x, const ShipShape& shape, double front_window,
                                  OscillationMeasure kind = OscillationMeasure::FirstExtrema) {
  const Grid& g = eta.grid;
  const double start = ship_x + 2.0 * shape.length;
  const double stop = ship_x + front_window * 0.5 * g.Lx;
  if (stop <= start) return 0.0;
  const auto window = detail::periodic_window(g, start, stop - start);
  if (window.indices.size() < 4) throw ConfigError("front_window", "oscillation window shorter than 4 cells");
  const int row = g.dim == 2 ? g.Ny / 2 : 0;
  const auto value = [&](std::size_t q) { return eta.at(window.indices[q], row); };
  const std::size_t n = window.indices.size();

  if (kind == OscillationMeasure::GlobalRange) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < n; ++q) {
      hi = std::max(hi, value(q));
      lo = std::min(lo, value(q));
    }
    return hi - lo;
  }

  std::optional<double> first_max;
  std::optional<double> first_min;
  for (std::size_t q = 1; q + 1 < n && !(first_max && first_min); ++q) {
    const double a = value(q - 1), b = value(q), c = value(q + 1);
    if (!first_max && b > a && b >= c) first_max = b;
    if (!first_min && b < a && b <= c) first_min = b;
  }
  if (!first_max || !first_min) return 0.0;
  return std::abs(*first_max - *first_min);
}

/// eps_{n+1} = gamma eps_n from eps_0 until measure(eps_n) < delta.
template <typename Measure>
TuneResult tune_epsilon(const TuneConfig& config, Measure&& measure) {
  config.validate();
  TuneResult result;
  double eps = config.epsilon0;
  for (int n = 0; n < config.max_iter; ++n) {
    if (n > 0) eps = config.epsilon0 * std::pow(config.gamma, n);
    const double m = measure(eps);
    result.trace.push_back({n, eps, m});
    if (m < config.delta) {
      result.epsilon_star = eps;
      result.iterations = n + 1;
      return result;
    }
  }
  throw TuningFailure("tune_epsilon: no damping below tolerance within " + std::to_string(config.max_iter) +
                          " iterations",
                      std::move(result.trace));
}

}  // namespace deadwater
