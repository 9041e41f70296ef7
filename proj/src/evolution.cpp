#include "cnls/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "cnls/error.hpp"
#include "cnls/format.hpp"
#include "cnls/spectral.hpp"

namespace cnls {
namespace {

constexpr double kBlowUpGrowth = 1e6;

void nonlinear_phase(ComplexField& u, double tau, Coupling mu) {
  const double s = coupling_sign(mu) * tau;
  for (Complex& z : u.data()) {
    const double m2 = std::norm(z);
    z *= std::polar(1.0, -s * m2 * m2);
  }
}

bool all_finite(const ComplexField& u, double& max_mod) {
  max_mod = 0.0;
  for (const Complex& z : u.data()) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    max_mod = std::max(max_mod, std::abs(z));
  }
  return true;
}

}  // namespace

Coupling coupling_from_int(int mu) {
  if (mu < -1 || mu > 1) throw ContractViolation("coupling must be -1, 0 or +1");
  return static_cast<Coupling>(mu);
}

std::string coupling_name(Coupling mu) {
  switch (mu) {
    case Coupling::Focusing: return "focusing";
    case Coupling::Free: return "free";
    case Coupling::Defocusing: return "defocusing";
  }
  return "unknown";
}

double max_stable_dt(double max_modulus) {
  const double m4 = std::pow(max_modulus, 4);
  return m4 > 0.0 ? kStepBound / m4 : INFINITY;
}

std::size_t SimulationConfig::steps() const {
  return static_cast<std::size_t>(std::llround(t_end / dt));
}

void SimulationConfig::validate(const ComplexField& u0) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractViolation("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw ContractViolation("t_end must be non-negative");
  }
  if (record_stride < 1) throw ContractViolation("record_stride must be >= 1");
  const double s = static_cast<double>(steps());
  if (std::abs(s * dt - t_end) > 1e-9 * std::max(1.0, t_end)) {
    throw ContractViolation("t_end must be an integer number of time steps");
  }
  if (mu != Coupling::Free) {
    const double m = max_modulus(u0);
    if (dt * std::pow(m, 4) > kStepBound) throw StepBoundViolation(m, dt);
  }
}

// ---------------------------------------------------------------------------

void FieldSeries::push(double t, ComplexField u) {
  require_same_grid(grid_, u.grid(), "FieldSeries::push");
  if (!times_.empty() && !(t > times_.back())) {
    throw ContractViolation("series times must be strictly increasing");
  }
  times_.push_back(t);
  fields_.push_back(std::move(u));
}

double FieldSeries::uniform_spacing(std::size_t min_records) const {
  if (times_.size() < min_records || times_.size() < 2) {
    throw ContractViolation("series needs at least " + std::to_string(min_records) +
                            " records, has " + std::to_string(times_.size()));
  }
  const double span = times_.back() - times_.front();
  const double dt = span / static_cast<double>(times_.size() - 1);
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (std::abs((times_[i] - times_[i - 1]) - dt) > 1e-9 * dt) {
      throw ContractViolation("series records are not uniformly spaced");
    }
  }
  return dt;
}

// ---------------------------------------------------------------------------

ComplexField nonlinearity(const ComplexField& u, Coupling mu) {
  require_spatial(u, "nonlinearity");
  ComplexField out = u;
  const double s = coupling_sign(mu);
  for (Complex& z : out.data()) {
    const double m2 = std::norm(z);
    z *= s * m2 * m2;
  }
  return out;
}

ComplexField step_strang(const ComplexField& u, double dt, Coupling mu) {
  require_spatial(u, "step_strang");
  if (mu == Coupling::Free) return free_propagate(u, dt);
  const double m = max_modulus(u);
  if (dt * std::pow(m, 4) > kStepBound) throw StepBoundViolation(m, dt);
  ComplexField v = u;
  nonlinear_phase(v, 0.5 * dt, mu);
  v = free_propagate(v, dt);
  nonlinear_phase(v, 0.5 * dt, mu);
  return v;
}

FieldSeries evolve(const SimulationConfig& config, const EvolveOptions& options) {
  return evolve(config, make_initial(config.grid(), config.initial), options);
}

FieldSeries evolve(const SimulationConfig& config, const ComplexField& u0,
                   const EvolveOptions& options, double t0) {
  require_spatial(u0, "evolve");
  config.validate(u0);
  FieldSeries series(u0.grid());
  const std::size_t steps = config.steps();
  const auto stride = static_cast<std::size_t>(config.record_stride);

  double initial_max = 0.0;
  if (!all_finite(u0, initial_max)) throw NumericalBlowUp("non-finite initial data", t0);

  std::size_t record = 0;
  auto emit = [&](std::size_t k, const ComplexField& u) {
    const double t = t0 + static_cast<double>(k) * config.dt;
    if (options.on_record) options.on_record(record, t, u);
    if (options.keep_series) series.push(t, u);
    ++record;
  };

  ComplexField u = u0;
  emit(0, u);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double last = t0 + static_cast<double>(k - 1) * config.dt;
    try {
      u = step_strang(u, config.dt, config.mu);
    } catch (const StepBoundViolation& e) {
      throw NumericalBlowUp(e.what(), last);
    }
    double m = 0.0;
    if (!all_finite(u, m)) throw NumericalBlowUp("non-finite sample", last);
    if (m > kBlowUpGrowth * initial_max && initial_max > 0.0) {
      throw NumericalBlowUp("max|u| grew beyond 1e6 times its initial value", last);
    }
    if (k % stride == 0 || k == steps) emit(k, u);
  }
  return series;
}

// ---------------------------------------------------------------------------

CheckReport duhamel_residual(const FieldSeries& series, Coupling mu) {
  const double h = series.uniform_spacing(3);
  const double t0 = series.time(0);
  const ComplexField u0_spec = to_spectral(series[0]);

  // G(s) = e^{-i (s - t0) Delta} N(u(s)), accumulated by Simpson's rule.
  auto pulled_back = [&](std::size_t m) {
    return free_propagate(to_spectral(nonlinearity(series[m], mu)), -(series.time(m) - t0));
  };
  ComplexField integral(series.grid(), Representation::Spectral);
  ComplexField g_prev = pulled_back(0);
  double worst = 0.0;
  for (std::size_t m = 2; m < series.size(); m += 2) {
    const ComplexField g_mid = pulled_back(m - 1);
    const ComplexField g_next = pulled_back(m);
    for (std::size_t i = 0; i < integral.size(); ++i) {
      integral[i] += (h / 3.0) * (g_prev[i] + 4.0 * g_mid[i] + g_next[i]);
    }
    g_prev = g_next;
    ComplexField predicted = add(u0_spec, integral, Complex(0.0, -1.0));
    predicted = free_propagate(predicted, series.time(m) - t0);
    const ComplexField residual = add(to_spectral(series[m]), predicted, -1.0);
    worst = std::max(worst, l2_norm(residual));
  }
  CheckReport r = CheckReport::from_norms("duhamel", worst, l2_norm(series[0]));
  r.metadata["record_spacing"] = fmt_double(h);
  r.metadata["records"] = std::to_string(series.size());
  r.metadata["mu"] = std::to_string(static_cast<int>(mu));
  return r;
}

CheckReport perturbation_experiment(const ComplexField& u0, const ComplexField& v0,
                                    const SimulationConfig& config) {
  require_same_grid(u0.grid(), v0.grid(), "perturbation_experiment");
  config.validate(u0);
  config.validate(v0);
  auto h1_distance = [](const ComplexField& a, const ComplexField& b) {
    return sobolev_norm(add(a, b, -1.0), 1.0, true);
  };
  const double initial = h1_distance(u0, v0);
  ComplexField u = u0, v = v0;
  double sup_h1 = initial, sup_l2 = l2_distance(u, v);
  const std::size_t steps = config.steps();
  for (std::size_t k = 1; k <= steps; ++k) {
    const double last = static_cast<double>(k - 1) * config.dt;
    try {
      u = step_strang(u, config.dt, config.mu);
      v = step_strang(v, config.dt, config.mu);
    } catch (const StepBoundViolation& e) {
      throw NumericalBlowUp(e.what(), last);
    }
    double m = 0.0;
    if (!all_finite(u, m) || !all_finite(v, m)) throw NumericalBlowUp("non-finite sample", last);
    sup_h1 = std::max(sup_h1, h1_distance(u, v));
    sup_l2 = std::max(sup_l2, l2_distance(u, v));
  }
  CheckReport r;
  r.name = "perturbation";
  if (initial == 0.0) {
    r.residual_norm = sup_l2;
    r.relative_residual = sup_l2;
    r.metadata["note"] = "identical data; absolute sup L2 difference reported";
  } else {
    r = CheckReport::from_norms("perturbation", sup_h1, initial);
    r.fitted_constant = sup_h1 / initial;
  }
  r.metadata["steps"] = std::to_string(steps);
  r.metadata["dt"] = fmt_double(config.dt);
  return r;
}

ComplexField rescale_solution(const ComplexField& u, double lambda, const Grid& grid_out) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ContractViolation("rescale factor must be positive");
  }
  const Grid& g = u.grid();
  if (grid_out.n() != g.n() ||
      std::abs(grid_out.box_length() - lambda * g.box_length()) >
          1e-12 * lambda * g.box_length()) {
    throw ContractViolation("rescale target grid must have the same n and side lambda * L");
  }
  const ComplexField spatial = u.is_spatial() ? u : to_spatial(u);
  ComplexBuffer data(spatial.data().begin(), spatial.data().end());
  const double c = 1.0 / std::sqrt(lambda);
  for (Complex& z : data) z *= c;
  return ComplexField(grid_out, Representation::Spatial, std::move(data));
}

SimulationConfig rescale_config(const SimulationConfig& config, double lambda) {
  SimulationConfig out = config;
  out.box_length = lambda * config.box_length;
  out.dt = lambda * lambda * config.dt;
  out.t_end = lambda * lambda * config.t_end;
  for (auto& [key, value] : out.initial.params) {
    if (key == "amplitude") {
      value /= std::sqrt(lambda);
    } else if (key == "width" || key == "separation" || key.rfind("center_", 0) == 0) {
      value *= lambda;
    } else if (key == "k" || key == "band" || key.rfind("k_", 0) == 0) {
      value /= lambda;
    } else if (key == "l2") {
      value *= lambda;
    }
  }
  return out;
}

}  // namespace cnls
