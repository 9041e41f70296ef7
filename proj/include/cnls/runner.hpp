#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cnls/check_report.hpp"
#include "cnls/scenario.hpp"

namespace cnls {

/// Process exit codes of run, verify and sweep.
enum ExitCode : int {
  kExitPass = 0,
  kExitCheckFailed = 1,
  kExitConfigError = 2,
  kExitBlowUp = 3,
};

/// Fixed leading CSV columns, version 1. Band-mass columns band_mass_<N>
/// follow in the order given by the scenario.
const std::vector<std::string>& csv_columns();
inline constexpr int kCsvVersion = 1;

struct RunOptions {
  std::string out_dir;                 // run directory, created if missing
  std::optional<std::uint64_t> seed;   // overrides [initial] seed
};

struct RunResult {
  int exit_code = kExitPass;
  std::string status;                  // "pass", "check_failed", "config_error", "blow_up"
  std::string message;
  std::string run_dir;
  std::vector<CheckReport> reports;
  double final_mass = 0.0;
  double final_energy = 0.0;
};

/// Evolves the scenario (and its dt * 2 companion when requested), runs the
/// checks, and writes scenario.ini, timeseries.csv, reports.json,
/// checkpoints and manifest.json into options.out_dir. Never throws for
/// scenario problems: they come back as kExitConfigError.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options);

struct VerifyResult {
  int exit_code = kExitPass;
  std::string message;
  double max_drift = 0.0;              // largest relative difference of a report number
};

/// Checks the manifest hashes, replays every checkpoint through the same
/// diagnostics and checks, and compares with the stored CSV and reports.
/// Exit 2 without a manifest, without a checkpoint at every record, or with a
/// missing or modified checkpoint; exit 1 on any other mismatch.
VerifyResult verify_run(const std::string& run_dir);

enum class SweepAxis { Dt, N, Lambda, Radius, NStar };
/// "dt", "n", "lambda", "R", "N_star". Throws ParseError otherwise.
SweepAxis parse_axis(const std::string& name);
std::string axis_name(SweepAxis axis);
/// Scenario with one axis set to `value`. lambda applies rescale_config and
/// scales every length parameter of the diagnostics and checks.
Scenario apply_axis(const Scenario& scenario, SweepAxis axis, double value);

struct SweepResult {
  int exit_code = kExitPass;
  std::string table_path;
  std::vector<RunResult> runs;
};

/// One run per value in out_dir/<axis>_<index>, at most `threads` at a
/// time, and the aggregated table out_dir/sweep.csv with per-check
/// residuals and the log-log slopes between neighbouring values. A config
/// error in any run aborts the sweep before anything is evolved.
SweepResult run_sweep(const Scenario& scenario, SweepAxis axis, const std::vector<double>& values,
                      const std::string& out_dir, int threads = 1);

/// Distance of the records to u_+(t) = e^{i(t - T)Δ} u(T), the free flow
/// through the final state, in relative H1: ||u(t) - u_+(t)||_H1 / ||u0||_H1.
/// fitted_constant and relative_residual carry the largest value over the
/// records (the last quarter of the run); metadata holds every value and
/// whether the sequence is non-increasing. Throws ContractViolation when the
/// initial energy exceeds `smallness`.
CheckReport scattering_report(const std::vector<double>& times,
                              const std::vector<ComplexField>& records, const ComplexField& u0,
                              Coupling mu, double smallness);

/// scattering_report over the checkpoints of a finished run (needs the
/// initial record and every record of the last quarter).
CheckReport scattering_compare(const std::string& run_dir, double smallness = 1.0);

}  // namespace cnls
