#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cnls/check_report.hpp"
#include "cnls/field.hpp"

namespace cnls {

/// Sign of the nonlinearity in i u_t + Delta u = mu |u|^4 u. Free switches the
/// nonlinearity off, which the verification oracles use as a reference flow.
enum class Coupling : int { Focusing = -1, Free = 0, Defocusing = 1 };

inline double coupling_sign(Coupling mu) { return static_cast<double>(static_cast<int>(mu)); }
Coupling coupling_from_int(int mu);
std::string coupling_name(Coupling mu);

/// Named initial-data generator plus numeric parameters.
///
///   gaussian              amplitude, width, center_x/y/z
///   modulated_gaussian    gaussian parameters plus k_x/y/z (cycles per length)
///                         and chirp (phase chirp |x - c|^2)
///   two_bump              amplitude, width, separation, k (bumps at -/+ separation/2
///                         along x, moving toward each other with -/+ k)
///   band_limited_random   band (dyadic N), amplitude, spikes (0: random Fourier
///                         coefficients in the band; >0: band projection of that
///                         many random point masses in the central half-box)
///   plane_wave            amplitude, k_x/y/z (integer multiples of 1/L)
///   constant              amplitude
struct InitialCondition {
  std::string generator = "gaussian";
  std::map<std::string, double> params;
  std::uint64_t seed = 0;

  double param(const std::string& key, double fallback) const;
};

ComplexField make_initial(const Grid& grid, const InitialCondition& ic);

/// Largest dt allowed by the nonlinear phase bound dt * max|u|^4 <= 0.1.
double max_stable_dt(double max_modulus);
inline constexpr double kStepBound = 0.1;

struct SimulationConfig {
  int n = 64;
  double box_length = 16.0;
  InitialCondition initial;
  Coupling mu = Coupling::Defocusing;
  double dt = 1e-3;
  double t_end = 1.0;
  int record_stride = 1;

  Grid grid() const { return Grid(n, box_length); }
  std::size_t steps() const;
  /// Throws ContractViolation for non-positive dt, t_end < 0, stride < 1, or
  /// t_end not an integer number of steps; StepBoundViolation for u0.
  void validate(const ComplexField& u0) const;
};

/// Time-ordered fields on one grid.
class FieldSeries {
 public:
  explicit FieldSeries(const Grid& grid) : grid_(grid) {}

  /// Throws ContractViolation unless t exceeds the last time and the grid matches.
  void push(double t, ComplexField u);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  double time(std::size_t i) const { return times_[i]; }
  const std::vector<double>& times() const { return times_; }
  const ComplexField& operator[](std::size_t i) const { return fields_[i]; }
  const ComplexField& back() const { return fields_.back(); }

  /// Common record spacing; throws ContractViolation when spacing varies by
  /// more than 1e-9 relative or there are fewer than `min_records` records.
  double uniform_spacing(std::size_t min_records) const;

 private:
  Grid grid_;
  std::vector<double> times_;
  std::vector<ComplexField> fields_;
};

/// One Strang step: half nonlinear phase, free flow over dt, half phase.
/// Throws StepBoundViolation when dt * max|u|^4 > 0.1.
ComplexField step_strang(const ComplexField& u, double dt, Coupling mu);

/// Called for every record (t = 0, every record_stride steps, and t_end).
using RecordHook = std::function<void(std::size_t record, double t, const ComplexField& u)>;

struct EvolveOptions {
  RecordHook on_record;
  /// Keep the records in the returned series. Long runs that only stream to
  /// hooks turn this off.
  bool keep_series = true;
};

/// Runs the configured scenario from its generator.
FieldSeries evolve(const SimulationConfig& config, const EvolveOptions& options = {});
/// Runs from explicit data (the generator in `config` is ignored). Starting
/// time t0 is added to every record time.
FieldSeries evolve(const SimulationConfig& config, const ComplexField& u0,
                   const EvolveOptions& options = {}, double t0 = 0.0);

/// mu |u|^4 u.
ComplexField nonlinearity(const ComplexField& u, Coupling mu);

/// Duhamel residual max_m ||u(t_m) - e^{i(t_m-t_0)Delta}u(t_0)
///   + i int_{t_0}^{t_m} e^{i(t_m-s)Delta} N(s) ds|| / ||u(t_m)|| over even m,
/// with composite Simpson over the records.
CheckReport duhamel_residual(const FieldSeries& series, Coupling mu);

/// Evolves u0 and v0 under `config` and reports
/// sup_t ||u - v||_{H^1 hom} / ||u0 - v0||_{H^1 hom} as fitted_constant.
CheckReport perturbation_experiment(const ComplexField& u0, const ComplexField& v0,
                                    const SimulationConfig& config);

/// u^lambda(x) = lambda^{-1/2} u(x / lambda) on grid_out, which must have the
/// same n and side lambda * L. Sample i of grid_out sits at lambda times the
/// position of sample i of the input grid, so resampling is exact.
ComplexField rescale_solution(const ComplexField& u, double lambda, const Grid& grid_out);

/// Scaled configuration: L -> lambda L, dt -> lambda^2 dt, t_end -> lambda^2
/// t_end, generator lengths -> lambda, amplitudes -> lambda^{-1/2}.
SimulationConfig rescale_config(const SimulationConfig& config, double lambda);

// Binary checkpoints ---------------------------------------------------------

struct Checkpoint {
  ComplexField field;
  double time = 0.0;
  Coupling mu = Coupling::Defocusing;
};

void write_checkpoint(const std::string& path, const ComplexField& u, double t, Coupling mu);
/// Throws Error on a missing, truncated, or malformed file.
Checkpoint read_checkpoint(const std::string& path);

}  // namespace cnls
