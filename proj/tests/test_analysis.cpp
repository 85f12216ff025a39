#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "deadwater/analysis.hpp"
#include "deadwater/solver.hpp"

using namespace deadwater;

TEST(RelativeL2, Examples) {
  const Grid g = Grid::line(10.0, 8);
  RealField b(g, {1, -2, 3, 0.5, 0, 1, 1, -1});
  RealField a = b;
  EXPECT_EQ(relative_l2_error(a, b), 0.0);
  for (auto& v : a.values) v *= 2.0;
  EXPECT_DOUBLE_EQ(relative_l2_error(a, b), 1.0);
  EXPECT_THROW(relative_l2_error(b, RealField(g)), DomainError);
}

TEST(RelativeL2, KnownPerturbation) {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> gauss;
  const Grid g = Grid::line(10.0, 64);
  for (int trial = 0; trial < 50; ++trial) {
    RealField b(g), d(g);
    for (auto& v : b.values) v = gauss(rng);
    for (auto& v : d.values) v = gauss(rng);
    const double p = 1e-3 * std::exp(gauss(rng));
    const double dn = l2_norm(d.values);
    RealField a = b;
    for (int i = 0; i < g.Nx; ++i) a.values[i] += p * d.values[i] / dn;
    EXPECT_NEAR(relative_l2_error(a, b), p / l2_norm(b.values), 1e-12 * p);
  }
}

TEST(ConvergenceOrder, SyntheticPowers) {
  for (double p : {1.0, 2.0, 4.0}) {
    std::vector<ErrorSample> s;
    for (double dt : {4.0, 2.0, 1.0, 0.5}) s.push_back({dt, 3.7 * std::pow(dt, p)});
    const auto fit = convergence_order(s);
    EXPECT_NEAR(fit.slope, p, 1e-12);
    EXPECT_NEAR(fit.intercept, std::log(3.7), 1e-12);
    EXPECT_LT(fit.residual, 1e-12);
  }
}

TEST(ConvergenceOrder, RejectsBadInput) {
  std::vector<ErrorSample> s{{1.0, 1.0}, {0.5, 0.0}, {0.25, 0.1}};
  EXPECT_THROW(convergence_order(s), DomainError);
  std::vector<ErrorSample> two{{1.0, 1.0}, {0.5, 0.5}};
  EXPECT_THROW(convergence_order(two), DomainError);
}

TEST(ConvergenceOrder, ScaleInvariance) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ErrorSample> s, scaled;
    const double c = u(rng);
    for (double dt : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
      const double e = u(rng) * dt;
      s.push_back({dt, e});
      scaled.push_back({dt, c * e});
    }
    const auto a = convergence_order(s), b = convergence_order(scaled);
    EXPECT_NEAR(a.slope, b.slope, 1e-12);
    EXPECT_NEAR(b.intercept - a.intercept, std::log(c), 1e-12);
  }
}

namespace {

struct Movie {
  std::vector<RealField> frames;
  std::vector<double> times;
};

template <typename F>
Movie movie(const Grid& g, int nt, double dt, F&& f) {
  Movie m;
  for (int n = 0; n < nt; ++n) {
    RealField eta(g);
    for (int i = 0; i < g.Nx; ++i) eta.values[i] = f(g.x(i), n * dt);
    m.frames.push_back(std::move(eta));
    m.times.push_back(n * dt);
  }
  return m;
}

std::pair<std::size_t, std::size_t> argmax(const SpacetimeSpectrum& s) {
  std::size_t best = 0;
  for (std::size_t q = 1; q < s.magnitude.size(); ++q)
    if (s.magnitude[q] > s.magnitude[best]) best = q;
  return {best / s.kappa.size(), best % s.kappa.size()};
}

}  // namespace

TEST(SpacetimeSpectrum, TravellingModePeaksAtItsWavenumberAndFrequency) {
  const Grid g = Grid::line(200.0, 128);
  const double k0 = 5.0 / 200.0, f0 = 0.0513;
  const auto m = movie(g, 256, 0.5, [&](double x, double t) { return std::cos(two_pi * (k0 * x - f0 * t)); });
  const auto s = spacetime_spectrum(m.frames, m.times, PhysicalParams{}, 0.4);
  // Hermitian pair: (k0, f0) and (-k0, -f0) carry equal magnitude; pick the positive one.
  const auto [fi, ki] = argmax(s);
  const double kap = std::abs(s.kappa[ki]);
  const double fr = s.kappa[ki] > 0 ? s.frequency[fi] : -s.frequency[fi];
  EXPECT_NEAR(kap, k0, 0.5 * s.kappa_bin());
  EXPECT_NEAR(fr, f0, s.frequency_bin());
}

TEST(SpacetimeSpectrum, StaticFieldSitsOnZeroFrequency) {
  const Grid g = Grid::line(100.0, 64);
  const auto m = movie(g, 64, 1.0, [](double x, double) { return std::sin(two_pi * 0.05 * x) + 0.3; });
  const auto s = spacetime_spectrum(m.frames, m.times, PhysicalParams{}, 0.4);
  const std::size_t zero = std::find(s.frequency.begin(), s.frequency.end(), 0.0) - s.frequency.begin();
  ASSERT_LT(zero, s.frequency.size());
  double on = 0.0, off = 0.0;
  for (std::size_t f = 0; f < s.frequency.size(); ++f) {
    for (std::size_t k = 0; k < s.kappa.size(); ++k) {
      const double e = s.at(f, k) * s.at(f, k);
      // The Hann window spreads a static line over the neighbouring bins only.
      (std::abs(static_cast<long>(f) - static_cast<long>(zero)) <= 1 ? on : off) += e;
    }
  }
  EXPECT_LT(off, 1e-24 * on);
}

TEST(SpacetimeSpectrum, MagnitudeIsPointSymmetric) {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> gauss;
  const Grid g = Grid::line(100.0, 32);
  std::vector<RealField> frames;
  std::vector<double> times;
  for (int n = 0; n < 32; ++n) {
    RealField eta(g);
    for (auto& v : eta.values) v = gauss(rng);
    frames.push_back(std::move(eta));
    times.push_back(0.25 * n);
  }
  const auto s = spacetime_spectrum(frames, times, PhysicalParams{}, 0.4);
  const std::size_t nf = s.frequency.size(), nk = s.kappa.size();
  double peak = *std::max_element(s.magnitude.begin(), s.magnitude.end());
  // Index 0 holds the unpaired Nyquist entry on both axes.
  for (std::size_t f = 1; f < nf; ++f)
    for (std::size_t k = 1; k < nk; ++k) EXPECT_NEAR(s.at(f, k), s.at(nf - f, nk - k), 1e-12 * peak);
}

TEST(SpacetimeSpectrum, RejectsRaggedInput) {
  std::vector<RealField> frames(20, RealField(Grid::line(10.0, 8)));
  std::vector<double> times(20);
  for (int n = 0; n < 20; ++n) times[n] = n;
  frames[7] = RealField(Grid::line(10.0, 16));
  EXPECT_THROW(spacetime_spectrum(frames, times, PhysicalParams{}, 0.4), ContractError);
  frames.resize(10);
  times.resize(10);
  EXPECT_THROW(spacetime_spectrum(frames, times, PhysicalParams{}, 0.4), ContractError);
}

TEST(SpacetimeSpectrum, OverlaysFollowDispersionAndShipLine) {
  const Grid g = Grid::line(100.0, 32);
  const auto m = movie(g, 16, 1.0, [](double, double) { return 0.0; });
  const PhysicalParams p;
  const auto s = spacetime_spectrum(m.frames, m.times, p, 0.65);
  for (std::size_t k = 0; k < s.kappa.size(); ++k) {
    EXPECT_NEAR(s.dispersion_overlay[k], omega(p, std::abs(s.kappa[k])) / two_pi, 1e-15);
    EXPECT_NEAR(s.ship_overlay[k], 0.65 * s.kappa[k], 1e-15);
  }
}

TEST(SpectralRidge, SeparatesShipLineFromDispersion) {
  // A ship-locked pattern near kappa = 0 and a free wave on the dispersion branch further out.
  const PhysicalParams p;
  const Grid g = Grid::line(400.0, 512);
  const double u = 0.3;
  const double k_ship = 4.0 / 400.0, k_free = 160.0 / 400.0;
  const double f_free = omega(p, k_free) / two_pi;
  const auto m = movie(g, 512, 1.0, [&](double x, double t) {
    return std::cos(two_pi * k_ship * (x - u * t)) + std::cos(two_pi * (k_free * x - f_free * t));
  });
  const auto s = spacetime_spectrum(m.frames, m.times, p, u);
  const auto r = spectral_ridge(s, 1e-2);
  ASSERT_FALSE(r.kappa.empty());
  for (std::size_t i = 0; i < r.kappa.size(); ++i) {
    if (std::abs(std::abs(r.kappa[i]) - k_ship) < 1e-9) {
      EXPECT_EQ(r.branch[i], RidgeBranch::ShipLine);
    }
    if (std::abs(std::abs(r.kappa[i]) - k_free) < 1e-9) {
      EXPECT_EQ(r.branch[i], RidgeBranch::Dispersion);
      EXPECT_NEAR(std::abs(r.frequency[i]), f_free, s.frequency_bin());
    }
  }
  EXPECT_FALSE(r.crossings.empty());
}

TEST(OverlayBlindRadius, AtLeastOneBin) {
  const Grid g = Grid::line(1000.0, 512);
  const auto m = movie(g, 64, 4.0, [](double, double) { return 0.0; });
  const auto s = spacetime_spectrum(m.frames, m.times, PhysicalParams{}, 0.65);
  const double r = overlay_blind_radius(s, 0.0);
  EXPECT_GE(r, s.kappa_bin());
  // Columns just outside the radius are resolvable.
  for (std::size_t k = 0; k < s.kappa.size(); ++k) {
    if (std::abs(s.kappa[k]) > r + 1e-12 && std::abs(s.kappa[k]) < r + 1.5 * s.kappa_bin()) {
      const double gap = std::abs(s.ship_overlay[k] - std::copysign(s.dispersion_overlay[k], s.kappa[k]));
      EXPECT_GT(gap, s.frequency_bin());
    }
  }
}

TEST(DominantWakeWavenumber, PureSinusoid) {
  const Grid g = Grid::line(2000.0, 4000);
  const double k1 = 0.25;
  RealField eta(g);
  for (int i = 0; i < g.Nx; ++i) eta.values[i] = std::sin(two_pi * k1 * g.x(i));
  const auto w = dominant_wake_wavenumber(eta, 300.0, ShipShape{}, 100.0);
  EXPECT_NEAR(w.kappa, k1, 1e-12);
  EXPECT_NEAR(w.bin, 0.01, 1e-3);
}

TEST(DominantWakeWavenumber, NoisySinusoid) {
  std::mt19937_64 rng(54);
  std::normal_distribution<double> gauss;
  const Grid g = Grid::line(2000.0, 8000);
  for (int trial = 0; trial < 20; ++trial) {
    const double k1 = 0.2 + 0.01 * trial;
    RealField eta(g);
    for (int i = 0; i < g.Nx; ++i) eta.values[i] = std::sin(two_pi * k1 * g.x(i)) + 0.1 * gauss(rng);
    const auto w = dominant_wake_wavenumber(eta, 0.0, ShipShape{}, 100.0);
    EXPECT_NEAR(w.kappa, k1, w.bin) << k1;
  }
}

TEST(DominantWakeWavenumber, EmptyOrTooShortWindow) {
  const Grid g = Grid::line(100.0, 64);
  RealField eta(g);
  for (int i = 0; i < g.Nx; ++i) eta.values[i] = std::sin(two_pi * 0.05 * g.x(i));
  EXPECT_THROW(dominant_wake_wavenumber(eta, 0.0, ShipShape{}, 1.0), ConfigError);
  EXPECT_THROW(dominant_wake_wavenumber(eta, 0.0, ShipShape{}, 40.0), ConfigError);
}

TEST(WakeConeEnergyFraction, InsideAndOutside) {
  const Grid g = Grid::plane(400.0, 128, 200.0, 64);
  const double phi = 0.5, ship = 150.0;
  RealField inside(g), outside(g);
  for (int j = 0; j < g.Ny; ++j) {
    for (int i = 0; i < g.Nx; ++i) {
      const double x = g.x(i), y = g.y(j);
      if (x >= ship - 20.0) continue;
      const double edge = std::tan(phi) * (ship - x);
      if (std::abs(y) <= 0.8 * edge) inside.at(i, j) = 1.0;
      if (std::abs(y) > 1.2 * edge) outside.at(i, j) = 1.0;
    }
  }
  EXPECT_EQ(wake_cone_energy_fraction(inside, ship, phi, 20.0), 0.0);
  EXPECT_EQ(wake_cone_energy_fraction(outside, ship, phi, 20.0), 1.0);
  EXPECT_EQ(wake_cone_energy_fraction(RealField(g), ship, phi, 20.0), 0.0);
  EXPECT_THROW(wake_cone_energy_fraction(RealField(Grid::line(10.0, 8)), 0.0, phi, 1.0), ContractError);
}
