#pragma once

// Diagnostics: error norms, convergence-order fits, space-time spectra and
// wake-regime measurements on simulated interface fields.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "deadwater/error.hpp"
#include "deadwater/forcing.hpp"
#include "deadwater/physics.hpp"
#include "deadwater/spectral.hpp"

namespace deadwater {

inline double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

/// ||a - b||_2 / ||b||_2.
inline double relative_l2_error(const RealField& a, const RealField& b) {
  if (!(a.grid == b.grid) || a.values.size() != b.values.size()) {
    throw ContractError("relative_l2_error: fields live on different grids");
  }
  const double denom = l2_norm(b.values);
  if (denom == 0.0) throw DomainError("relative_l2_error: reference field has zero norm");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    sum += d * d;
  }
  return std::sqrt(sum) / denom;
}

struct ErrorSample {
  double dt = 0.0;
  double error = 0.0;
};

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS deviation of log(error) from the fitted line
};

/// Least-squares fit of log(error) = slope log(dt) + intercept.
inline OrderFit convergence_order(std::span<const ErrorSample> samples) {
  if (samples.size() < 3) throw DomainError("convergence_order: need at least 3 samples");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& s : samples) {
    if (!(s.dt > 0.0) || !(s.error > 0.0)) throw DomainError("convergence_order: entries must be positive");
    const double x = std::log(s.dt);
    const double y = std::log(s.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(samples.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw DomainError("convergence_order: time steps must differ");
  OrderFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (const auto& s : samples) {
    const double r = std::log(s.error) - (fit.slope * std::log(s.dt) + fit.intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

/// |DFT| of eta(x, t) over a uniformly spaced 1D snapshot sequence. Axes are sorted
/// ascending; magnitude is row-major with frequency as the row index.
struct SpacetimeSpectrum {
  std::vector<double> kappa;      // cycles/m
  std::vector<double> frequency;  // Hz
  std::vector<double> magnitude;  // frequency.size() x kappa.size()
  std::vector<double> dispersion_overlay;  // omega(|kappa|) / (2 pi)
  std::vector<double> ship_overlay;        // kappa U_inf

  double at(std::size_t f, std::size_t k) const { return magnitude[f * kappa.size() + k]; }
  double kappa_bin() const { return kappa.size() > 1 ? kappa[1] - kappa[0] : 0.0; }
  double frequency_bin() const { return frequency.size() > 1 ? frequency[1] - frequency[0] : 0.0; }
};

/// Flat window in space (the field is periodic), Hann window in time. The temporal
/// kernel is exp(+2 pi i f t), so cos(2 pi (k0 x - f0 t)) peaks at (k0, f0).
inline SpacetimeSpectrum spacetime_spectrum(std::span<const RealField> snapshots, std::span<const double> times,
                                            const PhysicalParams& params, double u_inf) {
  const std::size_t nt = snapshots.size();
  if (nt < 16) throw ContractError("spacetime_spectrum: need at least 16 snapshots");
  if (times.size() != nt) throw ContractError("spacetime_spectrum: one time per snapshot required");
  const Grid grid = snapshots.front().grid;
  if (grid.dim != 1) throw ContractError("spacetime_spectrum: 1D fields only");
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw ContractError("spacetime_spectrum: times must increase");
  for (std::size_t n = 0; n < nt; ++n) {
    if (!(snapshots[n].grid == grid) || snapshots[n].values.size() != grid.size()) {
      throw ContractError("spacetime_spectrum: ragged snapshot set");
    }
    if (n > 0 && std::abs((times[n] - times[n - 1]) - dt) > 1e-9 * dt) {
      throw ContractError("spacetime_spectrum: snapshots are not uniformly spaced");
    }
  }

  const int nx = grid.Nx;
  const int rows = static_cast<int>(nt);
  std::vector<complex> data(static_cast<std::size_t>(rows) * nx);
  for (int n = 0; n < rows; ++n) {
    const double hann = 0.5 - 0.5 * std::cos(two_pi * n / rows);
    // The centring phase of x_0 = -Lx/2 only rotates each coefficient, so it is
    // irrelevant for the magnitude.
    for (int i = 0; i < nx; ++i) data[static_cast<std::size_t>(n) * nx + i] = hann * snapshots[n].values[i];
  }
  // Forward in both axes; the time axis is then read at -f to get the + kernel.
  detail::fft_inplace(data, rows, nx, FFTW_FORWARD);
  const double scale = 1.0 / (static_cast<double>(rows) * nx);

  SpacetimeSpectrum out;
  out.kappa.resize(nx);
  out.frequency.resize(rows);
  for (int i = 0; i < nx; ++i) out.kappa[i] = (i - nx / 2) / grid.Lx;
  for (int n = 0; n < rows; ++n) out.frequency[n] = (n - rows / 2) / (rows * dt);
  out.magnitude.resize(data.size());
  for (int fn = 0; fn < rows; ++fn) {
    const int m_f = fn - rows / 2;                      // desired signed frequency index
    const int src_f = ((-m_f) % rows + rows) % rows;    // forward transform reads -f
    for (int kn = 0; kn < nx; ++kn) {
      const int m_k = kn - nx / 2;
      const int src_k = (m_k % nx + nx) % nx;
      out.magnitude[static_cast<std::size_t>(fn) * nx + kn] =
          std::abs(data[static_cast<std::size_t>(src_f) * nx + src_k]) * scale;
    }
  }
  out.dispersion_overlay.resize(nx);
  out.ship_overlay.resize(nx);
  for (int kn = 0; kn < nx; ++kn) {
    const double k = out.kappa[kn];
    out.dispersion_overlay[kn] = omega(params, std::abs(k)) / two_pi;
    out.ship_overlay[kn] = k * u_inf;
  }
  return out;
}

enum class RidgeBranch { ShipLine, Dispersion };

struct SpectralRidge {
  std::vector<double> kappa;      // significant columns only, ascending
  std::vector<double> frequency;  // interpolated peak frequency per column, Hz
  std::vector<RidgeBranch> branch;
  std::vector<double> crossings;  // kappa where the branch label changes
};

/// Follows the ridge f_r(kappa) = argmax_f |S| (log-parabolic sub-bin refinement)
/// over columns whose peak is at least relative_floor times the global maximum and
/// |kappa| <= kappa_max. Each column is labelled by the nearer overlay, the ship line
/// f = kappa U_inf or the signed dispersion branch f = sign(kappa) omega/(2 pi); a
/// crossing is reported midway between adjacent columns with different labels.
inline SpectralRidge spectral_ridge(const SpacetimeSpectrum& s, double relative_floor = 1e-3,
                                    double kappa_max = std::numeric_limits<double>::infinity()) {
  const std::size_t nf = s.frequency.size();
  const std::size_t nk = s.kappa.size();
  if (nf < 3 || nk == 0) throw ContractError("spectral_ridge: spectrum too small");
  const double peak = *std::max_element(s.magnitude.begin(), s.magnitude.end());
  SpectralRidge out;
  if (!(peak > 0.0)) return out;
  const double fbin = s.frequency_bin();
  for (std::size_t k = 0; k < nk; ++k) {
    const double kap = s.kappa[k];
    if (kap == 0.0 || std::abs(kap) > kappa_max) continue;
    std::size_t best = 1;
    for (std::size_t f = 1; f + 1 < nf; ++f) {
      if (s.at(f, k) > s.at(best, k)) best = f;
    }
    if (s.at(best, k) < relative_floor * peak) continue;
    double offset = 0.0;
    const double a = s.at(best - 1, k), b = s.at(best, k), c = s.at(best + 1, k);
    if (a > 0.0 && c > 0.0) {
      const double la = std::log(a), lb = std::log(b), lc = std::log(c);
      const double curv = la - 2.0 * lb + lc;
      if (curv < 0.0) offset = 0.5 * (la - lc) / curv;
    }
    const double fr = s.frequency[best] + offset * fbin;
    const double line = s.ship_overlay[k];
    const double disp = std::copysign(s.dispersion_overlay[k], kap);
    out.kappa.push_back(kap);
    out.frequency.push_back(fr);
    out.branch.push_back(std::abs(fr - line) <= std::abs(fr - disp) ? RidgeBranch::ShipLine
                                                                     : RidgeBranch::Dispersion);
  }
  for (std::size_t i = 1; i < out.kappa.size(); ++i) {
    if (out.branch[i] != out.branch[i - 1]) out.crossings.push_back(0.5 * (out.kappa[i] + out.kappa[i - 1]));
  }
  return out;
}

/// Half-width of the contiguous kappa interval around kappa0 on which the two overlays
/// differ by at most one frequency bin, i.e. where the spectrum cannot tell them apart.
inline double overlay_blind_radius(const SpacetimeSpectrum& s, double kappa0) {
  const double fbin = s.frequency_bin();
  const auto blind = [&](std::size_t k) {
    const double disp = std::copysign(s.dispersion_overlay[k], s.kappa[k]);
    return std::abs(s.ship_overlay[k] - disp) <= fbin;
  };
  const auto nearest = std::min_element(s.kappa.begin(), s.kappa.end(), [&](double a, double b) {
    return std::abs(a - kappa0) < std::abs(b - kappa0);
  });
  const std::size_t c = static_cast<std::size_t>(nearest - s.kappa.begin());
  std::size_t lo = c, hi = c;
  while (lo > 0 && blind(lo - 1)) --lo;
  while (hi + 1 < s.kappa.size() && blind(hi + 1)) ++hi;
  return std::max({std::abs(s.kappa[lo] - kappa0), std::abs(s.kappa[hi] - kappa0), s.kappa_bin()});
}

namespace detail {

// Indices [first, last) of a periodic window of length `length` starting at x = start.
struct PeriodicWindow {
  std::vector<int> indices;
};

inline PeriodicWindow periodic_window(const Grid& g, double start, double length) {
  PeriodicWindow w;
  if (!(length > 0.0)) return w;
  const double dx = g.dx();
  const double first = std::ceil((start + 0.5 * g.Lx) / dx);
  const double last = std::floor((start + length + 0.5 * g.Lx) / dx);
  for (double j = first; j <= last; j += 1.0) {
    int idx = static_cast<int>(std::fmod(j, static_cast<double>(g.Nx)));
    if (idx < 0) idx += g.Nx;
    w.indices.push_back(idx);
  }
  return w;
}

}  // namespace detail

struct WakeWavenumber {
  double kappa = 0.0;  // cycles/m
  double bin = 0.0;    // native resolution 1/window_length of the segment transform
};

/// Peak wavenumber (excluding kappa = 0) of the wake segment
/// [ship_x - 2 L1 - window_length, ship_x - 2 L1], periodic in x. The segment is
/// Hann-windowed and zero-padded 8x to locate the peak between native bins.
inline WakeWavenumber dominant_wake_wavenumber(const RealField& eta, double ship_x, const ShipShape& shape,
                                               double window_length) {
  const Grid& g = eta.grid;
  if (g.dim != 1) throw ContractError("dominant_wake_wavenumber: 1D fields only");
  const double end = ship_x - 2.0 * shape.length;
  const auto window = detail::periodic_window(g, end - window_length, window_length);
  const int n = static_cast<int>(window.indices.size());
  if (n < 4) throw ConfigError("window", "wake window is empty");

  constexpr int pad = 8;
  const int m = n * pad;
  std::vector<complex> buf(m, 0.0);
  double mean = 0.0;
  for (int idx : window.indices) mean += eta.values[idx];
  mean /= n;
  for (int q = 0; q < n; ++q) {
    const double hann = 0.5 - 0.5 * std::cos(two_pi * (q + 0.5) / n);
    buf[q] = hann * (eta.values[window.indices[q]] - mean);
  }
  detail::fft_inplace(buf, 1, m, FFTW_FORWARD);

  int best = 1;
  for (int q = 1; q <= m / 2; ++q) {
    if (std::abs(buf[q]) > std::abs(buf[best])) best = q;
  }
  const double seg_len = n * g.dx();
  WakeWavenumber out{best / (m * g.dx()), 1.0 / seg_len};
  if (seg_len * out.kappa < 10.0) {
    throw ConfigError("window", "wake window spans fewer than 10 wavelengths of the detected peak");
  }
  return out;
}

/// Fraction of sum eta^2 behind the ship (x < ship_x - exclusion) lying outside the
/// cone |y| <= tan(phi*) (ship_x - x).
inline double wake_cone_energy_fraction(const RealField& eta, double ship_x, double phi_star,
                                        double exclusion_radius) {
  const Grid& g = eta.grid;
  if (g.dim != 2) throw ContractError("wake_cone_energy_fraction: 2D fields only");
  const double slope = std::tan(phi_star);
  double total = 0.0;
  double outside = 0.0;
  for (int j = 0; j < g.Ny; ++j) {
    const double y = g.y(j);
    for (int i = 0; i < g.Nx; ++i) {
      const double x = g.x(i);
      if (!(x < ship_x - exclusion_radius)) continue;
      const double e = eta.at(i, j) * eta.at(i, j);
      total += e;
      if (std::abs(y) > slope * (ship_x - x)) outside += e;
    }
  }
  return total > 0.0 ? outside / total : 0.0;
}

}  // namespace deadwater
