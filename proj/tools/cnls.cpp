#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <iostream>

#include "cnls/error.hpp"
#include "cnls/format.hpp"
#include "cnls/runner.hpp"
#include "cnls/scenario.hpp"

namespace fs = std::filesystem;
using namespace cnls;

namespace {

std::string default_out(const std::string& out, const std::string& name) {
  if (!out.empty()) return out;
  const char* root = std::getenv("CNLS_OUT_DIR");
  return (fs::path(root && *root ? root : "runs") / name).string();
}

void print_reports(const std::vector<CheckReport>& reports) {
  for (const auto& r : reports) {
    std::string line = fmt::format("  {:<34} {}  residual {}", r.name,
                                   r.passed() ? "ok  " : "FAIL", fmt_double(r.relative_residual));
    if (r.convergence_order) line += "  order " + fmt_double(*r.convergence_order);
    if (r.fitted_constant) line += "  fitted " + fmt_double(*r.fitted_constant);
    std::cout << line << '\n';
  }
}

int cmd_run(const std::string& path, const std::string& out, std::optional<std::uint64_t> seed) {
  Scenario s;
  try {
    s = load_scenario(path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  const RunResult r = run_scenario(s, RunOptions{default_out(out, s.name), seed});
  std::cout << fmt::format("{}: {} (exit {}) in {}\n", s.name, r.status, r.exit_code, r.run_dir);
  if (!r.message.empty()) std::cerr << r.message << '\n';
  print_reports(r.reports);
  return r.exit_code;
}

int cmd_sweep(const std::string& path, const std::string& out, const std::string& axis_text,
              const std::vector<double>& values, int threads) {
  try {
    const Scenario s = load_scenario(path);
    const SweepAxis axis = parse_axis(axis_text);
    const SweepResult r =
        run_sweep(s, axis, values, default_out(out, s.name + "_sweep_" + axis_name(axis)), threads);
    for (const auto& run : r.runs) {
      std::cout << fmt::format("{}: {} (exit {})\n", run.run_dir, run.status, run.exit_code);
      if (!run.message.empty()) std::cerr << run.message << '\n';
    }
    if (!r.table_path.empty()) std::cout << "table: " << r.table_path << '\n';
    return r.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

int cmd_list(const std::string& dir) {
  std::vector<fs::path> files;
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.path().extension() == ".ini") files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  int status = kExitPass;
  for (const auto& f : files) {
    try {
      const Scenario s = load_scenario(f.string());
      std::cout << fmt::format("{:<22} {}\n", s.name, s.description);
    } catch (const Error& e) {
      std::cout << fmt::format("{:<22} unreadable: {}\n", f.filename().string(), e.what());
      status = kExitConfigError;
    }
  }
  std::cout << "\nchecks:\n";
  for (const auto& c : check_registry()) {
    std::string params;
    for (const auto& p : c.params) params += (params.empty() ? "" : ", ") + p;
    std::cout << fmt::format("  {:<28} {}{}\n", c.id, c.description,
                             params.empty() ? "" : " [" + params + "]");
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral lab for the periodic 3-D quintic NLS"};
  app.require_subcommand(1);

  std::string scenario, out, axis, run_dir, dir = "scenarios";
  std::optional<std::uint64_t> seed;
  std::vector<double> values;
  int threads = 1;
  double smallness = 1.0;

  auto* run = app.add_subcommand("run", "Evolve a scenario and run its checks");
  run->add_option("--scenario", scenario, "Scenario file")->required();
  run->add_option("--out", out, "Run directory (default $CNLS_OUT_DIR/<name>)");
  run->add_option("--seed", seed, "Override the initial-condition seed");

  auto* verify = app.add_subcommand("verify", "Replay a run from its checkpoints");
  verify->add_option("run_dir", run_dir, "Run directory")->required();

  auto* sweep = app.add_subcommand("sweep", "Run a scenario over one axis");
  sweep->add_option("--scenario", scenario, "Template scenario file")->required();
  sweep->add_option("--axis", axis, "dt, n, lambda, R or N_star")->required();
  sweep->add_option("--values", values, "Axis values")->required()->delimiter(',');
  sweep->add_option("--out", out, "Sweep directory");
  sweep->add_option("--threads", threads, "Concurrent runs")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list-scenarios", "List scenario files and check types");
  list->add_option("--dir", dir, "Scenario directory");

  auto* scatter = app.add_subcommand("scatter", "Distance of a finished run to its free flow");
  scatter->add_option("run_dir", run_dir, "Run directory with checkpoints")->required();
  scatter->add_option("--smallness", smallness, "Largest initial energy accepted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  if (*run) return cmd_run(scenario, out, seed);
  if (*sweep) return cmd_sweep(scenario, out, axis, values, threads);
  if (*list) return cmd_list(dir);
  if (*verify) {
    const VerifyResult v = verify_run(run_dir);
    std::cout << (v.exit_code == kExitPass ? "verified: " : "verify failed: ") << v.message << '\n';
    return v.exit_code;
  }
  if (*scatter) {
    try {
      const CheckReport r = scattering_compare(run_dir, smallness);
      std::cout << fmt::format("max relative H1 distance {} over t >= {}, non-increasing {}\n",
                               fmt_double(*r.fitted_constant), r.metadata.at("from_time"),
                               r.metadata.at("non_increasing"));
      std::cout << "distances: " << r.metadata.at("distances") << '\n';
      return kExitPass;
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitConfigError;
    }
  }
  return kExitConfigError;
}
