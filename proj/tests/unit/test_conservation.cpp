#include <gtest/gtest.h>

#include <cmath>

#include "cnls/conservation.hpp"
#include "cnls/evolution.hpp"
#include "oracles.hpp"

using namespace cnls;

TEST(Conservation, GaussianTotalsMatchClosedForms) {
  const Grid g(64, 16.0);
  const double A = 0.8, w = 1.3;
  const Vec3 k{0.3, -0.1, 0.0};
  const ComplexField u = oracle::gaussian(g, A, w, {0.2, 0.0, 0.0}, k);
  const double mass = oracle::gaussian_mass(A, w);
  EXPECT_NEAR(total_mass(u), mass, 1e-12);
  const Vec3 p = total_momentum(u);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(p[j], 4.0 * oracle::kPi * k[j] * mass, 1e-11);
  const double kinetic = oracle::gaussian_gradient_sq(A, w, k);
  const double sixth = oracle::gaussian_sixth(A, w);
  EXPECT_NEAR(total_energy(u, Coupling::Defocusing), 0.5 * kinetic + sixth / 6.0, 1e-11);
  EXPECT_NEAR(total_energy(u, Coupling::Focusing), 0.5 * kinetic - sixth / 6.0, 1e-11);
  EXPECT_NEAR(total_energy(u, Coupling::Free), 0.5 * kinetic, 1e-11);
}

TEST(Conservation, BracketCancellationsOnResolvedData) {
  const Grid g(128, 16.0);
  const ComplexField u = oracle::gaussian(g, 1.0, 1.5, {}, {0.25, 0.0, 0.0});
  const BracketCancellation b = bracket_cancellation(u);
  EXPECT_LT(b.mass_max, 1e-15);
  EXPECT_LT(b.momentum_residual, 1e-8);
}

TEST(Conservation, MomentumBracketAgainstDirectFormula) {
  const Grid g(8, 2.0);
  const ComplexField f = oracle::random_field(g, 1);
  const ComplexField h = oracle::random_field(g, 2);
  const VectorField p = momentum_bracket(f, h);
  for (int j = 0; j < 3; ++j) {
    const ComplexField df = oracle::dft_derivative(f, j);
    const ComplexField dh = oracle::dft_derivative(h, j);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double expected = std::real(f[i] * std::conj(dh[i]) - h[i] * std::conj(df[i]));
      ASSERT_NEAR(p[j][i], expected, 1e-11);
    }
  }
  const RealField m = mass_bracket(f, h);
  for (std::size_t i = 0; i < f.size(); ++i) {
    ASSERT_NEAR(m[i], std::imag(f[i] * std::conj(h[i])), 1e-15);
  }
}

TEST(Conservation, LocalLawsHoldOnFreeFlow) {
  SimulationConfig c;
  c.n = 32;
  c.box_length = 12.0;
  c.initial.generator = "modulated_gaussian";
  c.initial.params = {{"amplitude", 1.0}, {"width", 1.2}, {"k_x", 0.2}};
  c.mu = Coupling::Free;
  c.dt = 1e-3;
  c.t_end = 0.02;
  const FieldSeries s = evolve(c);
  // Only the time stencil on the records remains.
  EXPECT_LT(check_local_mass(s, c.mu).relative_residual, 1e-4);
  EXPECT_LT(check_local_momentum(s, c.mu).relative_residual, 1e-4);
  EXPECT_LT(check_local_energy(s, c.mu).relative_residual, 1e-4);
  const CheckReport band = frequency_localized_mass_check(s, DyadicBand::above_eq(0.5), c.mu);
  EXPECT_LT(std::stod(band.metadata.at("band_mass_variation")), 1e-12);
}

TEST(Conservation, LocalLawsConvergeUnderQuinticFlow) {
  auto residual = [](double dt) {
    SimulationConfig c;
    c.n = 64;
    c.box_length = 12.0;
    c.initial.params = {{"amplitude", 1.0}, {"width", 1.5}};
    c.dt = dt;
    c.t_end = 0.02;
    return check_local_mass(evolve(c), c.mu).relative_residual;
  };
  const double coarse = residual(2e-3), fine = residual(1e-3);
  EXPECT_LT(fine, 1e-4);
  EXPECT_GT(std::log2(coarse / fine), 1.8);
}
