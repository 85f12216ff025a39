#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "deadwater/spectral.hpp"

using namespace deadwater;

namespace {

std::vector<complex> random_samples(std::size_t n, std::mt19937_64& rng, bool real) {
  std::normal_distribution<double> gauss;
  std::vector<complex> v(n);
  for (auto& c : v) c = complex(gauss(rng), real ? 0.0 : gauss(rng));
  return v;
}

double max_abs(const std::vector<complex>& v) {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  return m;
}

double max_diff(const std::vector<complex>& a, const std::vector<complex>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

const Grid kGrids[] = {Grid::line(100.0, 64), Grid::line(37.5, 10), Grid::plane(80.0, 16, 30.0, 8)};

}  // namespace

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(Grid::line(0.0, 8), ConfigError);
  EXPECT_THROW(Grid::line(1.0, 7), ConfigError);
  EXPECT_THROW(Grid::line(1.0, 2), ConfigError);
  EXPECT_THROW(Grid::plane(1.0, 8, 1.0, 5), ConfigError);
  EXPECT_THROW(Grid::plane(1.0, 8, -1.0, 8), ConfigError);
}

TEST(Grid, SamplesAndWavenumbers) {
  const Grid g = Grid::line(100.0, 8);
  EXPECT_DOUBLE_EQ(g.x(0), -50.0);
  EXPECT_DOUBLE_EQ(g.x(7), 37.5);
  EXPECT_DOUBLE_EQ(g.kx(1), 0.01);
  EXPECT_DOUBLE_EQ(g.kx(4), -0.04);
  EXPECT_DOUBLE_EQ(g.kx(7), -0.01);
  EXPECT_TRUE(g.is_nyquist(4));
  EXPECT_EQ(Grid::mirror_index(3, 8), 5);
  EXPECT_EQ(Grid::mirror_index(0, 8), 0);
}

TEST(DftForward, ConstantField) {
  const Grid g = Grid::line(10.0, 16);
  const auto c = dft_forward(RealField(g, std::vector<double>(16, 1.0)));
  EXPECT_NEAR(std::abs(c.at(0) - 1.0), 0.0, 1e-15);
  for (int i = 1; i < 16; ++i) EXPECT_LT(std::abs(c.at(i)), 1e-15);
}

TEST(DftForward, CosineSplitsIntoHalves) {
  const Grid g = Grid::line(50.0, 32);
  RealField f(g);
  const int m = 3;
  for (int i = 0; i < 32; ++i) f.values[i] = std::cos(two_pi * g.kx(m) * g.x(i));
  const auto c = dft_forward(f);
  for (int i = 0; i < 32; ++i) {
    const double expected = (i == m || i == 32 - m) ? 0.5 : 0.0;
    EXPECT_NEAR(c.at(i).real(), expected, 1e-14);
    EXPECT_NEAR(c.at(i).imag(), 0.0, 1e-14);
  }
}

TEST(DftForward, PureModeIsUnitCoefficient2D) {
  const Grid g = Grid::plane(20.0, 8, 12.0, 6);
  std::vector<complex> v(g.size());
  const int mi = 6, mj = 1;  // kx = -2/20, ky = 1/12
  for (int j = 0; j < g.Ny; ++j)
    for (int i = 0; i < g.Nx; ++i)
      v[j * g.Nx + i] = std::polar(1.0, two_pi * (g.kx(mi) * g.x(i) + g.ky(mj) * g.y(j)));
  const auto c = dft_forward(g, v);
  for (int j = 0; j < g.Ny; ++j)
    for (int i = 0; i < g.Nx; ++i)
      EXPECT_NEAR(std::abs(c.at(i, j) - complex(i == mi && j == mj ? 1.0 : 0.0)), 0.0, 1e-14);
}

TEST(DftForward, SizeMismatch) {
  const Grid g = Grid::line(1.0, 8);
  std::vector<complex> v(6);
  EXPECT_THROW(dft_forward(g, v), ContractError);
}

TEST(DftForward, RealFieldsAreHermitian) {
  std::mt19937_64 rng(11);
  for (const Grid& g : kGrids) {
    const auto v = random_samples(g.size(), rng, true);
    const auto c = dft_forward(g, v);
    const double scale = max_abs(c.values);
    for (int j = 0; j < g.rows(); ++j)
      for (int i = 0; i < g.Nx; ++i)
        EXPECT_LT(std::abs(c.at(i, j) - std::conj(mirrored(c, i, j))), 1e-12 * scale);
  }
}

TEST(DftInverse, DeltaCoefficientGivesMode) {
  const Grid g = Grid::line(40.0, 16);
  SpectralField c(g);
  c.at(13) = 1.0;
  const auto v = dft_inverse(c);
  for (int i = 0; i < 16; ++i) EXPECT_LT(std::abs(v[i] - std::polar(1.0, two_pi * g.kx(13) * g.x(i))), 1e-14);
}

TEST(DftInverse, RoundTripRandom) {
  std::mt19937_64 rng(12);
  for (const Grid& g : kGrids) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto v = random_samples(g.size(), rng, false);
      EXPECT_LT(max_diff(dft_inverse(dft_forward(g, v)), v), 1e-12 * max_abs(v));
      SpectralField c(g, random_samples(g.size(), rng, false));
      const auto back = dft_forward(g, dft_inverse(c));
      EXPECT_LT(max_diff(back.values, c.values), 1e-12 * max_abs(c.values));
    }
  }
}

TEST(DftInverse, Linearity) {
  std::mt19937_64 rng(13);
  const Grid g = kGrids[2];
  SpectralField f(g, random_samples(g.size(), rng, false));
  SpectralField h(g, random_samples(g.size(), rng, false));
  const complex a(1.5, -0.25), b(-0.7, 2.0);
  SpectralField mix(g);
  for (std::size_t k = 0; k < g.size(); ++k) mix.values[k] = a * f.values[k] + b * h.values[k];
  const auto lhs = dft_inverse(mix);
  const auto fi = dft_inverse(f);
  const auto hi = dft_inverse(h);
  std::vector<complex> rhs(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) rhs[k] = a * fi[k] + b * hi[k];
  EXPECT_LT(max_diff(lhs, rhs), 1e-12 * max_abs(rhs));
}

TEST(DftForward, Parseval) {
  std::mt19937_64 rng(14);
  for (const Grid& g : kGrids) {
    const auto v = random_samples(g.size(), rng, false);
    const auto c = dft_forward(g, v);
    double energy = 0.0, coeff = 0.0;
    for (const auto& s : v) energy += std::norm(s);
    for (const auto& s : c.values) coeff += std::norm(s);
    EXPECT_NEAR(coeff, energy / g.size(), 1e-12 * coeff);
  }
}

TEST(DftForward, ShiftTheorem) {
  std::mt19937_64 rng(15);
  const Grid g = Grid::line(64.0, 32);
  const auto v = random_samples(32, rng, false);
  for (int shift : {1, 5, 17}) {
    std::vector<complex> moved(32);
    for (int i = 0; i < 32; ++i) moved[i] = v[((i - shift) % 32 + 32) % 32];
    const auto a = dft_forward(g, v);
    const auto b = dft_forward(g, moved);
    const double x0 = shift * g.dx();
    for (int k = 0; k < 32; ++k) {
      EXPECT_LT(std::abs(b.at(k) - std::polar(1.0, -two_pi * g.kx(k) * x0) * a.at(k)), 1e-13) << k;
    }
  }
}

TEST(ImaginaryResidue, Basics) {
  std::vector<complex> zero(4);
  EXPECT_EQ(imaginary_residue(zero), 0.0);
  std::vector<complex> v{{1.0, 0.0}, {0.0, 0.5}, {2.0, 0.0}};
  EXPECT_DOUBLE_EQ(imaginary_residue(v), 0.25);
}

TEST(ZeroNyquist, ClearsUnpairedModes) {
  const Grid g = Grid::plane(1.0, 8, 1.0, 4);
  SpectralField f(g, std::vector<complex>(g.size(), complex(1.0, 1.0)));
  zero_nyquist(f);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 8; ++i) EXPECT_EQ(f.at(i, j) == complex(0.0), i == 4 || j == 2);
}

namespace {

RealField random_smooth(const Grid& g, std::mt19937_64& rng, bool zero_mean) {
  SpectralField c(g);
  std::normal_distribution<double> gauss;
  for (auto& v : c.values) v = complex(gauss(rng), gauss(rng));
  // Symmetrize so the samples are real.
  SpectralField h(g);
  for (int j = 0; j < g.rows(); ++j)
    for (int i = 0; i < g.Nx; ++i) h.at(i, j) = 0.5 * (c.at(i, j) + std::conj(mirrored(c, i, j)));
  zero_nyquist(h);
  if (zero_mean) h.at(0, 0) = 0.0;
  return real_part(g, dft_inverse(h));
}

double max_abs(const RealField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double max_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

}  // namespace

TEST(RecoverEtaPhi, LeftInverseOfComposition) {
  const PhysicalParams p;
  std::mt19937_64 rng(16);
  const Grid grids[] = {Grid::line(300.0, 64), Grid::plane(200.0, 16, 100.0, 8)};
  for (const Grid& g : grids) {
    for (int trial = 0; trial < 10; ++trial) {
      const RealField eta = random_smooth(g, rng, false);
      const RealField phi = random_smooth(g, rng, true);
      const auto out = recover_eta_phi(compose_mu(eta, phi, p), p);
      EXPECT_LT(max_diff(out.eta, eta), 1e-10 * max_abs(eta));
      EXPECT_LT(max_diff(out.phi, phi), 1e-10 * max_abs(phi));
      EXPECT_LT(out.eta_imaginary_residue, 1e-10);
      EXPECT_LT(out.phi_imaginary_residue, 1e-10);
    }
  }
}

TEST(RecoverEtaPhi, ZeroField) {
  const Grid g = Grid::line(10.0, 16);
  const auto out = recover_eta_phi(SpectralField(g), PhysicalParams{});
  for (double v : out.eta.values) EXPECT_EQ(v, 0.0);
  for (double v : out.phi.values) EXPECT_EQ(v, 0.0);
}

TEST(RecoverEtaPhi, HermitianFieldHasNoPotential) {
  std::mt19937_64 rng(17);
  const Grid g = Grid::plane(100.0, 16, 50.0, 8);
  const RealField eta = random_smooth(g, rng, false);
  const SpectralField mu = dft_forward(eta);
  const auto out = recover_eta_phi(mu, PhysicalParams{});
  EXPECT_LT(max_abs(out.phi), 1e-10 * max_abs(eta));
  EXPECT_LT(max_diff(out.eta, eta), 1e-12 * max_abs(eta));
}
