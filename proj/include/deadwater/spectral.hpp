#pragma once

// Periodic grids, the discrete Fourier transform, and recovery of the interface
// elevation eta and the potential phi from the evolved complex field mu.
//
// Conventions
//   samples      x_j = -Lx/2 + j Lx/Nx, j = 0..Nx-1 (2D: row-major, x fastest)
//   wavenumbers  storage index k maps to m = k (k < N/2) or m = k - N, kappa = m / L
//   forward      c_m = (1/N) sum_j v_j exp(-2 pi i kappa_m x_j)
//   inverse      v_j = sum_m c_m exp(+2 pi i kappa_m x_j)
// so a pure mode exp(2 pi i kappa_m x) has the single coefficient 1 at kappa_m.
// Continuum transforms relate to coefficients through division by the domain
// measure (Lx, or Lx Ly in 2D).

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "deadwater/error.hpp"
#include "deadwater/physics.hpp"

namespace deadwater {

using complex = std::complex<double>;

struct Grid {
  int dim = 1;
  double Lx = 1.0;
  int Nx = 4;
  double Ly = 0.0;
  int Ny = 1;

  static Grid line(double lx, int nx) {
    Grid g{1, lx, nx, 0.0, 1};
    g.validate();
    return g;
  }

  static Grid plane(double lx, int nx, double ly, int ny) {
    Grid g{2, lx, nx, ly, ny};
    g.validate();
    return g;
  }

  void validate() const {
    if (dim != 1 && dim != 2) throw ConfigError("dim", "grid dimension must be 1 or 2");
    if (!(Lx > 0.0)) throw ConfigError("Lx", "domain length must be positive");
    if (Nx < 4 || Nx % 2 != 0) throw ConfigError("Nx", "sample count must be even and >= 4");
    if (dim == 2) {
      if (!(Ly > 0.0)) throw ConfigError("Ly", "domain length must be positive");
      if (Ny < 4 || Ny % 2 != 0) throw ConfigError("Ny", "sample count must be even and >= 4");
    } else if (Ny != 1) {
      throw ConfigError("Ny", "a 1D grid has Ny = 1");
    }
  }

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(Nx) * static_cast<std::size_t>(dim == 2 ? Ny : 1);
  }
  int rows() const noexcept { return dim == 2 ? Ny : 1; }
  double dx() const noexcept { return Lx / Nx; }
  double dy() const noexcept { return dim == 2 ? Ly / Ny : 0.0; }
  double measure() const noexcept { return dim == 2 ? Lx * Ly : Lx; }

  double x(int j) const noexcept { return -0.5 * Lx + j * dx(); }
  double y(int j) const noexcept { return dim == 2 ? -0.5 * Ly + j * dy() : 0.0; }

  // Signed mode number of storage index k along an axis of n samples.
  static int signed_mode(int k, int n) noexcept { return k < n / 2 ? k : k - n; }
  // Storage index of the mode -m.
  static int mirror_index(int k, int n) noexcept { return k == 0 ? 0 : n - k; }

  double kx(int k) const noexcept { return signed_mode(k, Nx) / Lx; }
  double ky(int k) const noexcept { return dim == 2 ? signed_mode(k, Ny) / Ly : 0.0; }

  bool is_nyquist(int kx_index, int ky_index = 0) const noexcept {
    return kx_index == Nx / 2 || (dim == 2 && ky_index == Ny / 2);
  }

  bool operator==(const Grid&) const = default;
};

struct SpectralField {
  Grid grid;
  std::vector<complex> values;

  SpectralField() = default;
  explicit SpectralField(const Grid& g) : grid(g), values(g.size()) {}
  SpectralField(const Grid& g, std::vector<complex> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw ContractError("SpectralField: size mismatch");
  }

  complex& at(int kx, int ky = 0) { return values[static_cast<std::size_t>(ky) * grid.Nx + kx]; }
  const complex& at(int kx, int ky = 0) const {
    return values[static_cast<std::size_t>(ky) * grid.Nx + kx];
  }
};

struct RealField {
  Grid grid;
  std::vector<double> values;

  RealField() = default;
  explicit RealField(const Grid& g) : grid(g), values(g.size()) {}
  RealField(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw ContractError("RealField: size mismatch");
  }

  double& at(int i, int j = 0) { return values[static_cast<std::size_t>(j) * grid.Nx + i]; }
  double at(int i, int j = 0) const { return values[static_cast<std::size_t>(j) * grid.Nx + i]; }
};

namespace detail {

// In-place FFTW plans cached by shape and sign. Plan creation is serialized;
// execution on fresh arrays through fftw_execute_dft is thread-safe.
class FftPlanCache {
 public:
  static FftPlanCache& instance() {
    static FftPlanCache cache;
    return cache;
  }

  fftw_plan get(int rows, int cols, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(rows, cols, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    auto* buffer = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = rows == 1 ? fftw_plan_dft_1d(cols, buffer, buffer, sign, flags)
                               : fftw_plan_dft_2d(rows, cols, buffer, buffer, sign, flags);
    fftw_free(buffer);
    if (plan == nullptr) throw NumericalError("FFTW plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

  ~FftPlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  FftPlanCache() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

// Unnormalized in-place transform of a rows x cols row-major array.
inline void fft_inplace(std::span<complex> data, int rows, int cols, int sign) {
  if (data.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw ContractError("fft: buffer size does not match shape");
  }
  fftw_plan plan = FftPlanCache::instance().get(rows, cols, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

// (-1)^(kx + ky): the phase exp(-2 pi i kappa x_0) from centring samples at -L/2.
inline void apply_centring_phase(std::span<complex> data, const Grid& g) {
  for (int j = 0; j < g.rows(); ++j) {
    for (int i = 0; i < g.Nx; ++i) {
      if ((i + j) % 2 != 0) data[static_cast<std::size_t>(j) * g.Nx + i] *= -1.0;
    }
  }
}

}  // namespace detail

inline SpectralField dft_forward(const Grid& grid, std::span<const complex> samples) {
  if (samples.size() != grid.size()) throw ContractError("dft_forward: size mismatch");
  SpectralField out(grid, std::vector<complex>(samples.begin(), samples.end()));
  detail::fft_inplace(out.values, grid.rows(), grid.Nx, FFTW_FORWARD);
  detail::apply_centring_phase(out.values, grid);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& c : out.values) c *= scale;
  return out;
}

inline SpectralField dft_forward(const RealField& field) {
  std::vector<complex> samples(field.values.begin(), field.values.end());
  return dft_forward(field.grid, samples);
}

inline std::vector<complex> dft_inverse(const SpectralField& field) {
  if (field.values.size() != field.grid.size()) throw ContractError("dft_inverse: size mismatch");
  std::vector<complex> out = field.values;
  detail::apply_centring_phase(out, field.grid);
  detail::fft_inplace(out, field.grid.rows(), field.grid.Nx, FFTW_BACKWARD);
  return out;
}

/// max |Im v| / max |v|; 0 for an identically zero array.
inline double imaginary_residue(std::span<const complex> v) {
  double im = 0.0;
  double mag = 0.0;
  for (const auto& c : v) {
    im = std::max(im, std::abs(c.imag()));
    mag = std::max(mag, std::abs(c));
  }
  return mag > 0.0 ? im / mag : 0.0;
}

inline RealField real_part(const Grid& grid, std::span<const complex> v) {
  RealField out(grid);
  for (std::size_t i = 0; i < v.size(); ++i) out.values[i] = v[i].real();
  return out;
}

/// Zeroes every coefficient without a Hermitian partner on the even grid.
inline void zero_nyquist(SpectralField& f) {
  const Grid& g = f.grid;
  for (int j = 0; j < g.rows(); ++j) {
    for (int i = 0; i < g.Nx; ++i) {
      if (g.is_nyquist(i, j)) f.at(i, j) = 0.0;
    }
  }
}

/// Value of the coefficient at -kappa for storage position (i, j).
inline const complex& mirrored(const SpectralField& f, int i, int j) {
  const Grid& g = f.grid;
  return f.at(Grid::mirror_index(i, g.Nx), g.dim == 2 ? Grid::mirror_index(j, g.Ny) : 0);
}

/// |kappa| at storage position (i, j).
inline double wavenumber_norm(const Grid& g, int i, int j) {
  return std::hypot(g.kx(i), g.ky(j));
}

struct InterfaceFields {
  RealField eta;
  RealField phi;
  double eta_imaginary_residue = 0.0;
  double phi_imaginary_residue = 0.0;
};

/// eta_k = (mu_k + conj(mu_-k)) / 2 and phi_k = (mu_k - conj(mu_-k)) / (2 i alpha_k),
/// inverse transformed. phi_0 is pinned to 0; Nyquist rows are dropped.
inline InterfaceFields recover_eta_phi(const SpectralField& mu, const PhysicalParams& params,
                                       bool with_phi = true) {
  const Grid& g = mu.grid;
  SpectralField eta_hat(g);
  SpectralField phi_hat(g);
  for (int j = 0; j < g.rows(); ++j) {
    for (int i = 0; i < g.Nx; ++i) {
      if (g.is_nyquist(i, j)) continue;
      const complex a = mu.at(i, j);
      const complex b = std::conj(mirrored(mu, i, j));
      eta_hat.at(i, j) = 0.5 * (a + b);
      if (with_phi && !(i == 0 && j == 0)) {
        const double alpha = potential_weight(params, wavenumber_norm(g, i, j));
        phi_hat.at(i, j) = (a - b) / (complex(0.0, 2.0) * alpha);
      }
    }
  }
  InterfaceFields out;
  const auto eta = dft_inverse(eta_hat);
  out.eta = real_part(g, eta);
  out.eta_imaginary_residue = imaginary_residue(eta);
  if (with_phi) {
    const auto phi = dft_inverse(phi_hat);
    out.phi = real_part(g, phi);
    out.phi_imaginary_residue = imaginary_residue(phi);
  } else {
    out.phi = RealField(g);
  }
  return out;
}

/// mu_k = eta_k + i alpha_k phi_k, the inverse map of recover_eta_phi on fields with
/// zero-mean phi and no Nyquist content.
inline SpectralField compose_mu(const RealField& eta, const RealField& phi,
                                const PhysicalParams& params) {
  if (!(eta.grid == phi.grid)) throw ContractError("compose_mu: grid mismatch");
  const Grid& g = eta.grid;
  const SpectralField eta_hat = dft_forward(eta);
  const SpectralField phi_hat = dft_forward(phi);
  SpectralField mu(g);
  for (int j = 0; j < g.rows(); ++j) {
    for (int i = 0; i < g.Nx; ++i) {
      if (g.is_nyquist(i, j)) continue;
      const double alpha = (i == 0 && j == 0) ? 0.0 : potential_weight(params, wavenumber_norm(g, i, j));
      mu.at(i, j) = eta_hat.at(i, j) + complex(0.0, alpha) * phi_hat.at(i, j);
    }
  }
  return mu;
}

}  // namespace deadwater
