#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cnls/error.hpp"
#include "cnls/runner.hpp"
#include "cnls/spectral.hpp"
#include "oracles.hpp"

using namespace cnls;
namespace fs = std::filesystem;

namespace {

const char* kTiny = R"([scenario]
name = tiny

[grid]
n = 16
box_length = 8

[initial]
generator = modulated_gaussian
amplitude = 0.8
width = 1.2
k_x = 0.25

[evolution]
mu = defocusing
dt = 1e-3
t_end = 0.01
record_stride = 2
companion = true

[output]
checkpoint_stride = 1

[diagnostics]
radius = 1.5
breakdown = true
band_masses = 0.5, 1

[check mass_drift]
tolerance = 1e-12

[check energy_drift]
tolerance = 1e-4
min_order = 1.5
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("cnls_test_" + name);
  fs::remove_all(d);
  return d;
}

Scenario with(const std::string& from, const std::string& to) {
  std::string text = kTiny;
  const auto at = text.find(from);
  text.replace(at, from.size(), to);
  return parse_scenario(text);
}

}  // namespace

TEST(Runner, RunWritesListedArtifacts) {
  const fs::path dir = fresh_dir("run");
  const RunResult r = run_scenario(parse_scenario(kTiny), {dir.string(), std::nullopt});
  EXPECT_EQ(r.exit_code, kExitPass) << r.message;
  ASSERT_EQ(r.reports.size(), 2u);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["scenario_hash"], sha256_hex(kTiny));
  EXPECT_EQ(manifest["status"], "pass");
  std::size_t listed = 0;
  for (const auto& f : manifest["files"]) {
    EXPECT_EQ(f["sha256"], sha256_file((dir / f["path"].get<std::string>()).string()));
    ++listed;
  }
  std::size_t on_disk = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() != "manifest.json") ++on_disk;
  }
  EXPECT_EQ(listed, on_disk);
  EXPECT_TRUE(fs::exists(dir / "checkpoints" / "rec_000005.bin"));
  EXPECT_TRUE(fs::exists(dir / "companion" / "timeseries.csv"));

  std::istringstream csv(slurp(dir / "timeseries.csv"));
  std::string header;
  std::getline(csv, header);
  std::string expected;
  for (const auto& c : csv_columns()) expected += (expected.empty() ? "" : ",") + c;
  EXPECT_EQ(header, expected + ",band_mass_0.5,band_mass_1");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  EXPECT_EQ(rows, 6);
}

TEST(Runner, RepeatedRunsAreByteIdenticalAndVerify) {
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  run_scenario(parse_scenario(kTiny), {a.string(), std::nullopt});
  run_scenario(parse_scenario(kTiny), {b.string(), std::nullopt});
  EXPECT_EQ(slurp(a / "timeseries.csv"), slurp(b / "timeseries.csv"));
  EXPECT_EQ(slurp(a / "reports.json"), slurp(b / "reports.json"));
  EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));

  const VerifyResult v = verify_run(a.string());
  EXPECT_EQ(v.exit_code, kExitPass) << v.message;
  EXPECT_LE(v.max_drift, 1e-13);

  std::ofstream(b / "timeseries.csv", std::ios::app) << "0,0\n";
  EXPECT_EQ(verify_run(b.string()).exit_code, kExitCheckFailed);
}

TEST(Runner, VerifyRefusesMissingOrCorruptCheckpoints) {
  const fs::path dir = fresh_dir("verify");
  EXPECT_EQ(verify_run(dir.string()).exit_code, kExitConfigError);

  run_scenario(with("checkpoint_stride = 1", "checkpoint_stride = 0"), {dir.string(), std::nullopt});
  EXPECT_EQ(verify_run(dir.string()).exit_code, kExitConfigError);

  run_scenario(parse_scenario(kTiny), {dir.string(), std::nullopt});
  std::fstream f(dir / "checkpoints" / "rec_000002.bin", std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(100);
  f.put('\x7f');
  f.close();
  EXPECT_EQ(verify_run(dir.string()).exit_code, kExitConfigError);
}

TEST(Runner, SeedOverrideChangesRandomData) {
  const std::string text = std::string(kTiny).replace(
      std::string(kTiny).find("generator = modulated_gaussian"), 30, "generator = band_limited_random");
  const Scenario s = parse_scenario(text);
  const fs::path a = fresh_dir("seed_a"), b = fresh_dir("seed_b");
  run_scenario(s, {a.string(), 1});
  run_scenario(s, {b.string(), 2});
  EXPECT_NE(slurp(a / "timeseries.csv"), slurp(b / "timeseries.csv"));
  EXPECT_NE(slurp(a / "scenario.ini").find("seed = 1"), std::string::npos);
}

TEST(Runner, ExitCodes) {
  const RunResult bad = run_scenario(with("amplitude = 0.8", "amplitude = 4"), {fresh_dir("bad").string(), std::nullopt});
  EXPECT_EQ(bad.exit_code, kExitConfigError);
  EXPECT_NE(bad.message.find("step bound"), std::string::npos);

  const RunResult strict = run_scenario(with("tolerance = 1e-4", "tolerance = 1e-30"),
                                        {fresh_dir("strict").string(), std::nullopt});
  EXPECT_EQ(strict.exit_code, kExitCheckFailed);

  Scenario blow = parse_scenario(kTiny);
  blow.config.n = 32;
  blow.config.box_length = 4.0;
  blow.config.mu = Coupling::Focusing;
  blow.config.dt = 2e-4;
  blow.config.t_end = 0.1;
  blow.config.initial.generator = "gaussian";
  blow.config.initial.params = {{"amplitude", 3.0}, {"width", 0.5}};
  blow.diagnostics.radius = 0.5;
  blow.output.companion = false;
  blow.checks.clear();
  const fs::path dir = fresh_dir("blow");
  const RunResult r = run_scenario(blow, {dir.string(), std::nullopt});
  EXPECT_EQ(r.exit_code, kExitBlowUp);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["status"], "blow_up");
  EXPECT_GT(manifest["last_valid_time"].get<double>(), 0.0);
  const std::string csv = slurp(dir / "timeseries.csv");
  EXPECT_GT(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(Runner, CheckPreconditionsAreConfigErrors) {
  const Scenario s = with("[check mass_drift]", "[check interaction_bound]\nradius = 3\n\n[check mass_drift]");
  EXPECT_EQ(run_scenario(s, {fresh_dir("wrap").string(), std::nullopt}).exit_code, kExitConfigError);
}

TEST(Sweep, AxisRules) {
  EXPECT_EQ(parse_axis("N_star"), SweepAxis::NStar);
  EXPECT_THROW(parse_axis("time"), ParseError);
  const Scenario s = with("[check mass_drift]", "[check q]\ntype = frequency_localized_quartic\nn_star = 1\n\n[check mass_drift]");
  const Scenario l = apply_axis(s, SweepAxis::Lambda, 2.0);
  EXPECT_EQ(l.config.box_length, 16.0);
  EXPECT_EQ(l.config.dt, 4e-3);
  EXPECT_EQ(l.diagnostics.radius, 3.0);
  EXPECT_EQ(l.diagnostics.band_masses[0], 0.25);
  EXPECT_EQ(l.checks[0].number("n_star", 0.0), 0.5);
  EXPECT_EQ(apply_axis(s, SweepAxis::Radius, 1.0).diagnostics.radius, 1.0);
  EXPECT_EQ(apply_axis(s, SweepAxis::N, 32).config.n, 32);
}

TEST(Sweep, TableAndAbort) {
  const Scenario s = with("checkpoint_stride = 1", "checkpoint_stride = 0");
  const fs::path dir = fresh_dir("sweep");
  const SweepResult r = run_sweep(s, SweepAxis::Dt, {1e-3, 5e-4}, dir.string(), 2);
  EXPECT_EQ(r.exit_code, kExitPass);
  const std::string table = slurp(r.table_path);
  EXPECT_NE(table.find("dt,0.0005,dt_1,0,energy_drift"), std::string::npos);
  EXPECT_NE(table.find("final_energy"), std::string::npos);

  const fs::path bad = fresh_dir("sweep_bad");
  const SweepResult b = run_sweep(s, SweepAxis::N, {16, 12}, bad.string(), 1);
  EXPECT_EQ(b.exit_code, kExitConfigError);
  EXPECT_FALSE(fs::exists(bad / "n_0"));
}

TEST(Scattering, ZeroNonlinearityGivesZeroDistance) {
  const Grid g(16, 8.0);
  const ComplexField u0 = oracle::gaussian(g, 0.5, 1.0);
  std::vector<double> times{0.75, 0.875, 1.0};
  std::vector<ComplexField> records;
  for (double t : times) records.push_back(free_propagate(u0, t));
  const CheckReport r = scattering_report(times, records, u0, Coupling::Free, 1.0);
  EXPECT_LT(*r.fitted_constant, 1e-14);
  EXPECT_THROW(scattering_report(times, records, scale(u0, 10.0), Coupling::Defocusing, 1.0),
               ContractViolation);
}
