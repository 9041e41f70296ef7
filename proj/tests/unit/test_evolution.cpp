#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cnls/conservation.hpp"
#include "cnls/error.hpp"
#include "cnls/evolution.hpp"
#include "cnls/spectral.hpp"
#include "oracles.hpp"

using namespace cnls;

namespace {

SimulationConfig small_config(double dt, double t_end, Coupling mu = Coupling::Defocusing) {
  SimulationConfig c;
  c.n = 16;
  c.box_length = 8.0;
  c.initial.generator = "modulated_gaussian";
  c.initial.params = {{"amplitude", 1.0}, {"width", 1.0}, {"k_x", 0.25}};
  c.mu = mu;
  c.dt = dt;
  c.t_end = t_end;
  return c;
}

}  // namespace

TEST(Evolution, GeneratorMatchesDirectSampling) {
  const SimulationConfig c = small_config(1e-3, 0.0);
  const ComplexField u = make_initial(c.grid(), c.initial);
  const ComplexField v = oracle::gaussian(c.grid(), 1.0, 1.0, {}, {0.25, 0.0, 0.0});
  EXPECT_LT(l2_distance(u, v), 1e-14);
}

TEST(Evolution, FreeFlowIsExact) {
  SimulationConfig c = small_config(1e-3, 0.02, Coupling::Free);
  const FieldSeries s = evolve(c);
  const ComplexField expected = free_propagate(s[0], 0.02);
  EXPECT_LT(l2_distance(s.back(), expected) / l2_norm(expected), 1e-13);
}

TEST(Evolution, StrangConservesMass) {
  const FieldSeries s = evolve(small_config(1e-3, 0.05));
  const double m0 = total_mass(s[0]);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(total_mass(s[i]) / m0, 1.0, 1e-13);
}

TEST(Evolution, GlobalErrorIsSecondOrder) {
  auto final_state = [](double dt) { return evolve(small_config(dt, 0.04)).back(); };
  const ComplexField ref = final_state(1.25e-4);
  const double e1 = l2_distance(final_state(4e-3), ref);
  const double e2 = l2_distance(final_state(2e-3), ref);
  const double e3 = l2_distance(final_state(1e-3), ref);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.1);
  EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.1);
}

TEST(Evolution, RecordsFollowStride) {
  SimulationConfig c = small_config(1e-3, 0.01);
  c.record_stride = 4;
  const FieldSeries s = evolve(c);
  ASSERT_EQ(s.size(), 4u);  // 0, 4, 8 and the final step 10
  EXPECT_NEAR(s.time(3), 0.01, 1e-15);
}

TEST(Evolution, StepBoundRejected) {
  SimulationConfig c = small_config(0.2, 1.0);
  const ComplexField u0 = make_initial(c.grid(), c.initial);
  EXPECT_THROW(c.validate(u0), StepBoundViolation);
  EXPECT_THROW(evolve(c), StepBoundViolation);
  EXPECT_NEAR(max_stable_dt(2.0), 0.1 / 16.0, 1e-15);
}

TEST(Evolution, InvalidConfigRejected) {
  SimulationConfig c = small_config(3e-3, 0.01);  // not a whole number of steps
  EXPECT_THROW(c.validate(make_initial(c.grid(), c.initial)), ContractViolation);
}

TEST(Evolution, FocusingCollapseReportsBlowUp) {
  SimulationConfig c;
  c.n = 32;
  c.box_length = 4.0;
  c.initial.params = {{"amplitude", 3.0}, {"width", 0.5}};
  c.mu = Coupling::Focusing;
  c.dt = 2e-4;
  c.t_end = 0.1;
  try {
    evolve(c);
    FAIL() << "expected blow-up";
  } catch (const NumericalBlowUp& e) {
    EXPECT_GT(e.last_valid_time(), 0.0);
    EXPECT_LT(e.last_valid_time(), 0.1);
  }
}

TEST(Evolution, ScalingCovarianceIsExact) {
  const SimulationConfig c = small_config(1e-3, 0.02);
  const ComplexField u = evolve(c).back();
  for (double lambda : {0.5, 2.0}) {
    const SimulationConfig cl = rescale_config(c, lambda);
    const ComplexField ul = evolve(cl).back();
    const ComplexField expected = rescale_solution(u, lambda, cl.grid());
    EXPECT_LT(l2_distance(ul, expected) / l2_norm(expected), 1e-12);
    EXPECT_NEAR(total_mass(ul) / total_mass(u), lambda * lambda, 1e-12);
    EXPECT_NEAR(total_energy(ul, c.mu) / total_energy(u, c.mu), 1.0, 1e-12);
  }
}

TEST(Evolution, DuhamelResidualSmall) {
  const FieldSeries s = evolve(small_config(1e-3, 0.02));
  const CheckReport r = duhamel_residual(s, Coupling::Defocusing);
  EXPECT_LT(r.relative_residual, 1e-5);
}

TEST(Evolution, CheckpointRoundTripIsBitExact) {
  const Grid g(8, 2.0);
  const ComplexField u = oracle::random_field(g, 21);
  const auto path = std::filesystem::temp_directory_path() / "cnls_ckpt_test.bin";
  write_checkpoint(path.string(), u, 0.125, Coupling::Focusing);
  const Checkpoint c = read_checkpoint(path.string());
  EXPECT_EQ(c.time, 0.125);
  EXPECT_EQ(c.mu, Coupling::Focusing);
  ASSERT_TRUE(c.field.grid() == g);
  for (std::size_t i = 0; i < u.size(); ++i) ASSERT_EQ(c.field[i], u[i]);

  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size - 8);
  EXPECT_THROW(read_checkpoint(path.string()), Error);
  std::filesystem::remove(path);
  EXPECT_THROW(read_checkpoint(path.string()), Error);
}

TEST(FieldSeries, RejectsNonIncreasingTimes) {
  const Grid g(4, 1.0);
  FieldSeries s(g);
  s.push(0.0, ComplexField(g, Representation::Spatial));
  EXPECT_THROW(s.push(0.0, ComplexField(g, Representation::Spatial)), ContractViolation);
  EXPECT_THROW(s.push(1.0, ComplexField(Grid(8, 1.0), Representation::Spatial)), ContractViolation);
}
