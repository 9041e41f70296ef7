// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "cnls/conservation.hpp"
#include "cnls/morawetz.hpp"
#include "cnls/norms.hpp"
#include "cnls/runner.hpp"
#include "cnls/spectral.hpp"
#include "oracles.hpp"

using namespace cnls;
namespace fs = std::filesystem;

namespace {

const double kMinOrder = std::log2(3.5);  // residual ratio 3.5 per dt halving
const fs::path kRoot = fs::temp_directory_path() / "cnls_acceptance";

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [fails]");
  }
};

std::string g(double v) { return fmt::format("{:.3g}", v); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string scenario_path(const std::string& name) {
  return std::string(CNLS_SCENARIO_DIR) + "/" + name + ".ini";
}

// Runs are cached: several criteria read the same scenario.
const RunResult& run(const std::string& name) {
  static std::map<std::string, RunResult> cache;
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  const RunResult r = run_scenario(load_scenario(scenario_path(name)), {(kRoot / name).string(), std::nullopt});
  return cache.emplace(name, r).first->second;
}

const CheckReport& report(const RunResult& r, const std::string& name) {
  for (const auto& c : r.reports) {
    if (c.name == name) return c;
  }
  static CheckReport missing;
  missing = CheckReport::from_norms(name + " (missing)", HUGE_VAL, 1.0);
  return missing;
}

void residual_and_order(Outcome& o, const RunResult& r, const std::string& name, double tol) {
  const CheckReport& c = report(r, name);
  const double order = c.convergence_order.value_or(0.0);
  o.require(c.relative_residual < tol, fmt::format("{} residual {} < {}", name, g(c.relative_residual), g(tol)));
  o.require(order >= kMinOrder, fmt::format("order {}", g(order)));
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

int cli(const std::string& args) {
  const int status = std::system((std::string(CNLS_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Outcome acc_conservation() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const RunResult& r = run("quintic_gaussian");
  const double elapsed = seconds_since(start);
  o.require(r.exit_code == kExitPass, "exit " + std::to_string(r.exit_code));
  const double mass = report(r, "mass_drift").relative_residual;
  const double momentum = report(r, "momentum_drift").residual_norm;
  const CheckReport& energy = report(r, "energy_drift");
  o.require(mass < 1e-12, "mass " + g(mass));
  o.require(momentum < 1e-10, "momentum " + g(momentum));
  o.require(energy.relative_residual < 1e-6, "energy " + g(energy.relative_residual));
  const double order = energy.convergence_order.value_or(0.0);
  o.require(std::abs(order - 2.0) <= 0.3, "energy order " + g(order));
  o.require(elapsed < 120.0, fmt::format("{:.0f} s with companion", elapsed));
  return o;
}

Outcome acc_local_laws() {
  Outcome o;
  const RunResult& r = run("identity_suite");
  for (const char* name : {"local_mass", "local_momentum", "local_energy"}) residual_and_order(o, r, name, 1e-4);
  return o;
}

Outcome acc_brackets() {
  Outcome o;
  const RunResult& r = run("brackets");
  const double m = report(r, "bracket_cancellation_mass").relative_residual;
  const double p = report(r, "bracket_cancellation_momentum").relative_residual;
  o.require(m < 1e-14, "max|{N,u}_m| / max|N||u| = " + g(m));
  o.require(p < 1e-8, "momentum bracket residual " + g(p));
  return o;
}

Outcome acc_virial() {
  Outcome o;
  residual_and_order(o, run("identity_suite"), "virial", 1e-4);
  // a = |x|^2 on the free flow: d/dt M_a against 8 int |grad u|^2 in closed form.
  const Grid grid(64, 16.0);
  const Vec3 k{0.2, 0.0, -0.1};
  const ComplexField u = oracle::gaussian(grid, 1.0, 1.0, {}, k);
  const MorawetzWeight q = MorawetzWeight::quadratic({0, 0, 0});
  const double d = 1e-3;
  auto m = [&](double t) { return morawetz_action(free_propagate(u, t), q); };
  const double dm = (-m(2 * d) + 8 * m(d) - 8 * m(-d) + m(-2 * d)) / (12 * d);
  const double expected = 8.0 * oracle::gaussian_gradient_sq(1.0, 1.0, k);
  const double rel = std::abs(dm - expected) / expected;
  o.require(rel < 1e-6, "quadratic weight vs 8||grad u||^2: " + g(rel));
  return o;
}

Outcome acc_vdot() {
  Outcome o;
  residual_and_order(o, run("identity_suite"), "vdot", 1e-4);
  return o;
}

Outcome acc_interaction_oracle() {
  Outcome o;
  const Grid grid(8, 8.0);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ComplexField u = oracle::random_field(grid, 1000 + seed);
    const double fast = interaction_potential(u, 1.5, WeightMode::Lattice);
    const double slow = oracle::brute_force_interaction(u, 1.5);
    worst = std::max(worst, std::abs(fast - slow) / std::abs(slow));
  }
  o.require(worst < 1e-10, "20 random fields on 8^3, worst relative difference " + g(worst));
  return o;
}

Outcome acc_interaction_derivative() {
  Outcome o;
  residual_and_order(o, run("identity_suite"), "interaction_derivative", 1e-3);
  return o;
}

// lambda family of the interaction Morawetz scenario, shared by 8 and 9.
const SweepResult& lambda_sweep() {
  static const SweepResult r = run_sweep(load_scenario(scenario_path("interaction_morawetz")),
                                         SweepAxis::Lambda, {0.5, 1.0, 2.0},
                                         (kRoot / "lambda_sweep").string(), 1);
  return r;
}

std::vector<double> across_lambda(const std::string& check) {
  std::vector<double> out;
  for (const auto& run : lambda_sweep().runs) out.push_back(report(run, check).fitted_constant.value_or(0.0));
  return out;
}

Outcome acc_interaction_bounds() {
  Outcome o;
  const Grid grid(32, 16.0);
  const double radius = 2.0;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> c(-2.0, 2.0), w(0.8, 1.6), kk(-0.5, 0.5), a(0.3, 1.5);
  std::vector<double> constants;
  for (int i = 0; i < 100; ++i) {
    ComplexField u(grid, Representation::Spatial);
    for (int bump = 0; bump < 2; ++bump) {
      const Vec3 center{c(rng), c(rng), c(rng)}, k{kk(rng), kk(rng), kk(rng)};
      const double amp = a(rng), width = w(rng);
      u = add(u, oracle::gaussian(grid, amp, width, center, k));
    }
    const double m = interaction_potential(u, radius);
    const double l2 = l2_norm(u);
    constants.push_back(std::abs(m) / (l2 * l2 * l2 * sobolev_norm(u, 1.0, true)));
  }
  std::vector<double> fitted;
  for (int group = 0; group < 4; ++group) {
    fitted.push_back(*std::max_element(constants.begin() + 25 * group, constants.begin() + 25 * (group + 1)));
  }
  const double c_all = *std::max_element(constants.begin(), constants.end());
  o.require(spread(fitted) <= 2.0,
            fmt::format("fitted C = {} over 100 fields, per-quarter spread {}", g(c_all), g(spread(fitted))));
  const auto ratios = across_lambda("interaction_inequality");
  bool ok = lambda_sweep().exit_code == kExitPass;
  o.require(ok && spread(ratios) <= 2.0,
            fmt::format("inequality LHS/RHS {} {} {} across lambda 1/2,1,2", g(ratios[0]), g(ratios[1]), g(ratios[2])));
  return o;
}

Outcome acc_quartic_scaling() {
  Outcome o;
  const auto v = across_lambda("frequency_localized_quartic");
  o.require(spread(v) <= 1.1, fmt::format("value N*^3 = {} {} {}, spread {}", g(v[0]), g(v[1]), g(v[2]), g(spread(v))));
  return o;
}

Outcome acc_pseudoconformal() {
  Outcome o;
  residual_and_order(o, run("pseudoconformal"), "pseudoconformal", 1e-4);
  const double free = report(run("pseudoconformal_free"), "pseudoconformal").relative_residual;
  o.require(free < 1e-6, "free-flow weighted norm constancy " + g(free));
  return o;
}

Outcome acc_bilinear() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const CheckReport r = bilinear_strichartz_experiment();
  const double elapsed = seconds_since(start);
  const double slope = r.fitted_constant.value_or(0.0);
  o.require(slope <= -0.4, "fitted exponent " + g(slope));
  o.require(elapsed < 300.0, fmt::format("{:.0f} s", elapsed));
  return o;
}

Outcome acc_bernstein() {
  Outcome o;
  const BernsteinResult b = bernstein_sweep();
  for (const auto& r : b.reports) {
    const double slope = std::stod(r.metadata.at("fitted_exponent"));
    const double expected = std::stod(r.metadata.at("expected_exponent"));
    const double constant_spread = std::stod(r.metadata.at("constant_max")) / std::stod(r.metadata.at("constant_min"));
    o.require(std::abs(slope - expected) <= 0.1 && constant_spread <= 2.0,
              fmt::format("{} slope {} vs {}, C spread {}", r.name, g(slope), g(expected), g(constant_spread)));
  }
  return o;
}

Outcome acc_frequency_localized_mass() {
  Outcome o;
  const double r = report(run("identity_suite"), "frequency_localized_mass").relative_residual;
  o.require(r < 1e-4, "identity residual " + g(r));
  const RunResult& free = run("free_gaussian");
  o.require(free.exit_code == kExitPass, "free_gaussian exit " + std::to_string(free.exit_code));
  const double c = report(free, "frequency_localized_mass_constancy").relative_residual;
  o.require(c < 1e-12, "free-flow band mass variation " + g(c));
  return o;
}

Outcome acc_scattering() {
  Outcome o;
  const RunResult& r = run("small_scattering");
  const CheckReport& s = report(r, "scattering");
  const double worst = s.fitted_constant.value_or(HUGE_VAL);
  o.require(worst < 0.1 && s.metadata.count("non_increasing") && s.metadata.at("non_increasing") == "true",
            "max relative H1 distance over the last quarter " + g(worst) + ", non-increasing");
  const double horizon = load_scenario(scenario_path("small_scattering")).config.grid().wraparound_horizon();
  const double t_end = load_scenario(scenario_path("small_scattering")).config.t_end;
  o.require(t_end <= horizon, fmt::format("t_end {} within horizon {}", g(t_end), g(horizon)));
  const SweepResult sw = run_sweep(load_scenario(scenario_path("small_scattering")), SweepAxis::Lambda,
                                   {0.5, 2.0}, (kRoot / "scattering_lambda").string(), 1);
  std::vector<double> v{worst};
  for (const auto& run : sw.runs) v.push_back(report(run, "scattering").fitted_constant.value_or(HUGE_VAL));
  o.require(spread(v) <= 2.0, fmt::format("lambda 1/2, 2 give {} {}", g(v[1]), g(v[2])));
  return o;
}

Outcome acc_determinism() {
  Outcome o;
  const fs::path a = kRoot / "det_a", b = kRoot / "det_b";
  const std::string s = scenario_path("determinism");
  const int ea = cli("run --scenario " + s + " --out " + a.string() + " --seed 7");
  const int eb = cli("run --scenario " + s + " --out " + b.string() + " --seed 7");
  o.require(ea == 0 && eb == 0, fmt::format("run exits {} {}", ea, eb));
  const bool same = slurp(a / "timeseries.csv") == slurp(b / "timeseries.csv") &&
                    slurp(a / "companion" / "timeseries.csv") == slurp(b / "companion" / "timeseries.csv");
  o.require(same && !slurp(a / "timeseries.csv").empty(), "byte-identical CSV");
  const int v = cli("verify " + a.string());
  o.require(v == 0, "verify exit " + std::to_string(v));
  return o;
}

}  // namespace

int main() {
  fs::remove_all(kRoot);
  fs::create_directories(kRoot);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"conservation", acc_conservation},
      {"local conservation identities", acc_local_laws},
      {"bracket cancellations", acc_brackets},
      {"virial identity", acc_virial},
      {"dV_a/dt = M_a", acc_vdot},
      {"interaction potential oracle", acc_interaction_oracle},
      {"interaction derivative decomposition", acc_interaction_derivative},
      {"interaction Morawetz bounds", acc_interaction_bounds},
      {"frequency-localized quartic scaling", acc_quartic_scaling},
      {"pseudoconformal law", acc_pseudoconformal},
      {"bilinear Strichartz scaling", acc_bilinear},
      {"Bernstein sweeps", acc_bernstein},
      {"frequency-localized mass identity", acc_frequency_localized_mass},
      {"small-data scattering surrogate", acc_scattering},
      {"determinism", acc_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    fmt::print("{} {:2d} {}: {} ({:.0f} s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail,
               seconds_since(start));
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria pass\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
