#include <gtest/gtest.h>

#include <cmath>

#include "cnls/error.hpp"
#include "cnls/norms.hpp"
#include "cnls/spectral.hpp"
#include "oracles.hpp"

using namespace cnls;

namespace {

FieldSeries series_of(const std::vector<ComplexField>& fields, double dt) {
  FieldSeries s(fields.front().grid());
  for (std::size_t i = 0; i < fields.size(); ++i) s.push(i * dt, fields[i]);
  return s;
}

std::vector<ComplexField> random_fields(const Grid& g, int count, std::uint64_t seed) {
  std::vector<ComplexField> out;
  for (int i = 0; i < count; ++i) out.push_back(oracle::random_field(g, seed + i));
  return out;
}

ComplexField shifted(const ComplexField& u, int di, int dj, int dk) {
  const Grid& g = u.grid();
  const int n = g.n();
  ComplexField out(g, Representation::Spatial);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out[g.index((i + di) % n, (j + dj) % n, (k + dk) % n)] = u[g.index(i, j, k)];
  return out;
}

}  // namespace

TEST(Admissible, PairsOnTheLine) {
  for (const auto& p : listed_admissible_pairs()) {
    const double r_inv = std::isinf(p.r) ? 0.0 : 3.0 / p.r;
    const double q_inv = std::isinf(p.q) ? 0.0 : 2.0 / p.q;
    EXPECT_NEAR(q_inv + r_inv, 1.5, 1e-12);
  }
  EXPECT_EQ(listed_admissible_pairs().size(), 6u);
  EXPECT_NO_THROW(AdmissiblePair::make(4.0, 3.0));
  EXPECT_NO_THROW(AdmissiblePair::make(kInfinity, 2.0));
  EXPECT_THROW(AdmissiblePair::make(3.0, 3.0), ContractViolation);
  EXPECT_THROW(AdmissiblePair::make(1.5, 18.0), ContractViolation);
}

TEST(SpacetimeNorm, ConstantField) {
  const Grid g(8, 3.0);
  ComplexField u(g, Representation::Spatial);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = Complex(1.2, -0.5);
  const double dt = 0.05;
  const FieldSeries s = series_of(std::vector<ComplexField>(5, u), dt);
  const double T = 4 * dt;
  const double expected = 1.3 * std::pow(T * 27.0, 0.1);
  EXPECT_NEAR(spacetime_norm(s, {10.0, 10.0, 0, {}}), expected, 1e-13);
  EXPECT_NEAR(spacetime_norm(s, {kInfinity, 2.0, 0, {}}), 1.3 * std::sqrt(27.0), 1e-13);
  EXPECT_NEAR(spacetime_norm(s, {2.0, kInfinity, 0, {}}), 1.3 * std::sqrt(T), 1e-13);
}

TEST(SpacetimeNorm, Homogeneity) {
  const Grid g(8, 2.0);
  const auto fields = random_fields(g, 4, 30);
  std::vector<ComplexField> scaled;
  for (const auto& f : fields) scaled.push_back(scale(f, Complex(0.0, -3.0)));
  for (const auto& p : listed_admissible_pairs()) {
    for (int k : {0, 1, 2}) {
      const SpacetimeNormSpec spec{p.q, p.r, k, {}};
      const double a = spacetime_norm(series_of(fields, 0.1), spec);
      const double b = spacetime_norm(series_of(scaled, 0.1), spec);
      EXPECT_NEAR(b, 3.0 * a, 1e-12 * b);
    }
  }
}

TEST(SpacetimeNorm, TranslationInvariance) {
  const Grid g(8, 2.0);
  const auto fields = random_fields(g, 3, 50);
  std::vector<ComplexField> moved;
  for (const auto& f : fields) moved.push_back(shifted(f, 3, 1, 6));
  for (int k : {0, 1, 2}) {
    const SpacetimeNormSpec spec{4.0, 3.0, k, {}};
    const double a = spacetime_norm(series_of(fields, 0.1), spec);
    const double b = spacetime_norm(series_of(moved, 0.1), spec);
    EXPECT_NEAR(a, b, 1e-13 * a);
  }
}

TEST(SpacetimeNorm, GradientConsistencyOnPlaneWave) {
  const Grid g(8, 2.0);
  const Vec3 k{1.0, 0.5, -1.5};
  const double freq = 2.0 * oracle::kPi * std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
  const ComplexField u = oracle::gaussian(g, 0.7, INFINITY, {}, k);
  const FieldSeries s = series_of({u, u, u}, 0.1);
  const double n0 = spacetime_norm(s, {5.0, 30.0 / 11.0, 0, {}});
  EXPECT_NEAR(spacetime_norm(s, {5.0, 30.0 / 11.0, 1, {}}), freq * n0, 1e-12 * freq * n0);
  EXPECT_NEAR(spacetime_norm(s, {5.0, 30.0 / 11.0, 2, {}}), freq * freq * n0, 1e-11 * freq * freq * n0);
}

TEST(SpacetimeNorm, SingleRecordNeedsInfiniteQ) {
  const Grid g(4, 1.0);
  const FieldSeries s = series_of({oracle::random_field(g, 1)}, 0.1);
  EXPECT_THROW(spacetime_norm(s, {2.0, 6.0, 0, {}}), ContractViolation);
  EXPECT_NO_THROW(spacetime_norm(s, {kInfinity, 2.0, 0, {}}));
}

TEST(SpacetimeNorm, MonitorMatchesBatch) {
  const Grid g(8, 2.0);
  const auto fields = random_fields(g, 5, 70);
  const SpacetimeNormSpec spec{10.0 / 3.0, 10.0 / 3.0, 1, DyadicBand::at(2.0)};
  SpacetimeNormMonitor m(spec);
  for (std::size_t i = 0; i < fields.size(); ++i) m.observe(0.1 * i, fields[i]);
  EXPECT_DOUBLE_EQ(m.value(), spacetime_norm(series_of(fields, 0.1), spec));
}

TEST(Strichartz, ZeroAndHomogeneity) {
  const Grid g(8, 2.0);
  const auto fields = random_fields(g, 3, 90);
  std::vector<ComplexField> zero(3, ComplexField(g, Representation::Spatial)), doubled;
  for (const auto& f : fields) doubled.push_back(scale(f, 2.0));
  EXPECT_EQ(strichartz_s_norm(series_of(zero, 0.1), 0), 0.0);
  const double a = strichartz_s_norm(series_of(fields, 0.1), 1);
  EXPECT_NEAR(strichartz_s_norm(series_of(doubled, 0.1), 1), 2.0 * a, 1e-12 * a);
  const auto parts = strichartz_components(series_of(fields, 0.1), 1);
  EXPECT_EQ(parts.size(), 6u);
  EXPECT_DOUBLE_EQ(*std::max_element(parts.begin(), parts.end()), a);
}

TEST(Bernstein, HighFrequencyGradientConstant) {
  const Grid g(32, 4.0);
  const ComplexField u = oracle::random_field(g, 4);
  for (double n : {1.0, 2.0, 4.0}) {
    const double c = highfreq_gradient_constant(u, n);
    EXPECT_GT(c, 0.0);
    EXPECT_LE(c, 2.0);
  }
}
