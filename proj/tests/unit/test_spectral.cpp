#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cnls/error.hpp"
#include "cnls/spectral.hpp"
#include "oracles.hpp"

using namespace cnls;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST(Grid, RejectsNonPowerOfTwo) {
  EXPECT_THROW(Grid(12, 1.0), ContractViolation);
  EXPECT_THROW(Grid(16, 0.0), ContractViolation);
  EXPECT_NO_THROW(Grid(16, 2.0));
}

TEST(Grid, SampleAndFrequencyConvention) {
  const Grid g(8, 4.0);
  EXPECT_DOUBLE_EQ(g.position(g.index(4, 4, 4))[0], 0.0);
  EXPECT_DOUBLE_EQ(g.position(g.index(0, 0, 0))[0], -2.0);
  EXPECT_DOUBLE_EQ(g.frequency(g.index(1, 0, 0))[0], 0.25);
  EXPECT_DOUBLE_EQ(g.frequency(g.index(7, 0, 0))[0], -0.25);
  EXPECT_TRUE(g.is_nyquist(g.index(4, 0, 0)));
  EXPECT_NEAR(g.wraparound_horizon(), 4.0 * 0.5 / (4.0 * std::numbers::pi), 1e-15);
}

TEST(Spectral, RoundTripIsIdentity) {
  const Grid g(16, 3.0);
  const ComplexField u = oracle::random_field(g, 3);
  const ComplexField back = to_spatial(to_spectral(u));
  EXPECT_LT(l2_distance(u, back) / l2_norm(u), 1e-14);
}

TEST(Spectral, ContinuumTransformOfGaussian) {
  // h^3 sum e^{-2 pi i xi x} e^{-|x|^2} = pi^{3/2} e^{-pi^2 |xi|^2} up to aliasing.
  const Grid g(32, 16.0);
  const ComplexField s = to_spectral(oracle::gaussian(g, 1.0, 1.0));
  for (int a : {0, 1, 3}) {
    const std::size_t idx = g.index(a, 0, 0);
    const double xi = g.frequency(idx)[0];
    const double expected = std::pow(std::numbers::pi, 1.5) * std::exp(-std::pow(std::numbers::pi * xi, 2));
    EXPECT_NEAR(std::abs(s[idx]), expected, 1e-12);
  }
}

TEST(Spectral, DerivativeMatchesDirectDft) {
  const Grid g(8, 2.0);
  const ComplexField u = oracle::random_field(g, 11);
  for (int j = 0; j < 3; ++j) {
    const ComplexField fast = derivative(u, j);
    const ComplexField slow = oracle::dft_derivative(u, j);
    EXPECT_LT(l2_distance(fast, slow) / l2_norm(slow), 1e-13) << "axis " << j;
  }
}

TEST(Spectral, PlaneWaveDerivativeAndPropagation) {
  const Grid g(16, 2.0);
  const Vec3 k{1.5, -0.5, 1.0};
  const ComplexField u = oracle::gaussian(g, 1.0, INFINITY, {}, k);
  const ComplexField d = derivative(u, 0);
  for (std::size_t i = 0; i < u.size(); i += 37) {
    EXPECT_NEAR(std::abs(d[i] - Complex(0.0, kTwoPi * k[0]) * u[i]), 0.0, 1e-12);
  }
  const double t = 0.013;
  const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
  const ComplexField v = free_propagate(u, t);
  const Complex phase = std::polar(1.0, -kTwoPi * kTwoPi * k2 * t);
  for (std::size_t i = 0; i < u.size(); i += 37) EXPECT_NEAR(std::abs(v[i] - phase * u[i]), 0.0, 1e-12);
}

TEST(Spectral, NyquistDroppedFromDerivative) {
  const Grid g(8, 1.0);
  ComplexField u(g, Representation::Spatial);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::cos(kTwoPi * 4.0 * g.position(i)[0]);
  EXPECT_LT(l2_norm(derivative(u, 0)), 1e-12);
}

TEST(Spectral, LatticeBandsPartitionMeanZeroFields) {
  const Grid g(16, 2.0);
  ComplexField u = oracle::random_field(g, 5);
  Complex mean = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) mean += u[i];
  mean /= static_cast<double>(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] -= mean;
  ComplexField sum(g, Representation::Spatial);
  for (double n : lattice_bands(g)) sum = add(sum, lp_project(u, DyadicBand::at(n)));
  EXPECT_LT(l2_distance(sum, u) / l2_norm(u), 1e-13);
}

TEST(Spectral, LowHighSplitIsExact) {
  const Grid g(16, 2.0);
  const ComplexField u = oracle::random_field(g, 8);
  for (double n : resolvable_bands(g)) {
    const ComplexField sum = add(lp_project(u, DyadicBand::below(n)), lp_project(u, DyadicBand::above_eq(n)));
    EXPECT_LT(l2_distance(sum, u) / l2_norm(u), 1e-14);
  }
}

TEST(Spectral, SobolevNormOfGaussian) {
  const Grid g(64, 16.0);
  const Vec3 k{0.25, 0.0, 0.0};
  const ComplexField u = oracle::gaussian(g, 0.7, 1.2, {0.5, 0.0, -0.25}, k);
  const double h1 = sobolev_norm(u, 1.0, true);
  EXPECT_NEAR(h1 * h1, oracle::gaussian_gradient_sq(0.7, 1.2, k), 1e-10);
  EXPECT_NEAR(l2_norm(u) * l2_norm(u), oracle::gaussian_mass(0.7, 1.2), 1e-12);
}

TEST(Spectral, LpNormsOfConstant) {
  const Grid g(8, 2.0);
  ComplexField u(g, Representation::Spatial);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = Complex(0.0, 3.0);
  EXPECT_NEAR(lp_norm(u, 4.0), 3.0 * std::pow(8.0, 0.25), 1e-13);
  EXPECT_NEAR(lp_norm(u, INFINITY), 3.0, 0.0);
}
