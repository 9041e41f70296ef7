#include "cnls/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

#include "cnls/conservation.hpp"
#include "cnls/error.hpp"
#include "cnls/format.hpp"
#include "cnls/identity_check.hpp"
#include "cnls/morawetz.hpp"
#include "cnls/norms.hpp"
#include "cnls/slice.hpp"
#include "cnls/spectral.hpp"

#ifndef CNLS_VERSION
#define CNLS_VERSION "unknown"
#endif

namespace cnls {
namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns = {
      "t",           "mass",         "energy",         "momentum_x",   "momentum_y",
      "momentum_z",  "V_a",          "M_a",            "M_interact",   "hdot_half",
      "quartic_term", "quartic_kernel_term", "angular_term", "momentum_bracket_term",
      "cross_term",  "error_band_term", "mass_bracket_term", "remainder_term"};
  return columns;
}

namespace {

// Quantities of one record shared by the CSV row and the drift checks.
struct RowValues {
  double mass = 0.0;
  double energy = 0.0;
  Vec3 momentum{};
};

class Handler {
 public:
  explicit Handler(CheckSpec spec) : spec_(std::move(spec)) {}
  virtual ~Handler() = default;
  virtual void observe(double t, SliceQuantities& q, const RowValues& row) = 0;
  /// `coarse` is the handler of the same check in the companion run.
  virtual std::vector<CheckReport> finish(const Handler* coarse) const = 0;

 protected:
  CheckReport& thresholds(CheckReport& r) const {
    r.name = spec_.label;
    r.metadata["check"] = spec_.type;
    if (auto v = spec_.optional_number("tolerance")) r.tolerance = v;
    if (auto v = spec_.optional_number("min_order")) r.min_order = v;
    if (auto v = spec_.optional_number("max_order")) r.max_order = v;
    return r;
  }
  CheckSpec spec_;
};

class DriftHandler : public Handler {
 public:
  enum class Kind { Mass, Momentum, Energy };
  DriftHandler(CheckSpec spec, Kind kind) : Handler(std::move(spec)), kind_(kind) {}

  void observe(double, SliceQuantities&, const RowValues& row) override {
    Vec3 v{};
    if (kind_ == Kind::Mass) v[0] = row.mass;
    if (kind_ == Kind::Energy) v[0] = row.energy;
    if (kind_ == Kind::Momentum) v = row.momentum;
    if (!started_) {
      started_ = true;
      initial_ = v;
    }
    const double d = std::hypot(v[0] - initial_[0], v[1] - initial_[1], v[2] - initial_[2]);
    worst_ = std::max(worst_, d);
  }

  double relative() const {
    return kind_ == Kind::Momentum ? worst_ : worst_ / std::max(std::abs(initial_[0]), 1e-300);
  }

  std::vector<CheckReport> finish(const Handler* coarse) const override {
    CheckReport r = CheckReport::from_norms(
        "", worst_, kind_ == Kind::Momentum ? 1.0 : std::abs(initial_[0]));
    r.metadata["initial"] = fmt_double(initial_[0]);
    if (coarse && (spec_.has("min_order") || spec_.has("max_order"))) {
      const double c = static_cast<const DriftHandler*>(coarse)->relative();
      r.convergence_order = observed_order(c, relative());
      r.metadata["coarse_relative_residual"] = fmt_double(c);
    }
    return {thresholds(r)};
  }

 private:
  Kind kind_;
  bool started_ = false;
  Vec3 initial_{};
  double worst_ = 0.0;
};

class BracketHandler : public Handler {
 public:
  using Handler::Handler;
  void observe(double, SliceQuantities& q, const RowValues&) override {
    const BracketCancellation b = bracket_cancellation(q.u());
    mass_ = std::max(mass_, b.mass_max);
    momentum_ = std::max(momentum_, b.momentum_residual);
  }
  std::vector<CheckReport> finish(const Handler*) const override {
    CheckReport m = CheckReport::from_norms("", mass_, 1.0);
    CheckReport p = CheckReport::from_norms("", momentum_, 1.0);
    thresholds(m);
    thresholds(p);
    m.name = spec_.label + "_mass";
    p.name = spec_.label + "_momentum";
    m.tolerance = spec_.number("mass_tolerance", 1e-14);
    p.tolerance = spec_.number("momentum_tolerance", 1e-8);
    return {m, p};
  }

 private:
  double mass_ = 0.0, momentum_ = 0.0;
};

class MonitorHandler : public Handler {
 public:
  MonitorHandler(CheckSpec spec, IdentityMonitor monitor)
      : Handler(std::move(spec)), monitor_(std::move(monitor)) {}
  void observe(double t, SliceQuantities& q, const RowValues&) override { monitor_.observe(t, q); }
  std::vector<CheckReport> finish(const Handler* coarse) const override {
    CheckReport r = coarse ? convergence_report(
                                 monitor_, static_cast<const MonitorHandler*>(coarse)->monitor_)
                           : monitor_.finish();
    std::vector<CheckReport> out{thresholds(r)};
    if (auto tol = spec_.optional_number("constancy_tolerance")) {
      CheckReport c = CheckReport::from_norms(
          spec_.label + "_constancy", std::stod(r.metadata.at("band_mass_variation")), 1.0);
      c.metadata["check"] = spec_.type;
      c.tolerance = tol;
      out.push_back(c);
    }
    return out;
  }

 private:
  IdentityMonitor monitor_;
};

class InteractionBoundHandler : public Handler {
 public:
  InteractionBoundHandler(CheckSpec spec, double radius)
      : Handler(std::move(spec)), radius_(radius) {}
  void observe(double, SliceQuantities& q, const RowValues& row) override {
    const double m = interaction_potential(q.u(), radius_);
    const double h1 = sobolev_norm(q.u(), 1.0, true);
    const double scale = std::pow(row.mass, 1.5) * h1;
    if (scale > 0.0) worst_ = std::max(worst_, std::abs(m) / scale);
  }
  std::vector<CheckReport> finish(const Handler*) const override {
    CheckReport r = CheckReport::from_norms("", 0.0, 1.0);
    r.fitted_constant = worst_;
    r.metadata["radius"] = fmt_double(radius_);
    return {thresholds(r)};
  }

 private:
  double radius_;
  double worst_ = 0.0;
};

class InequalityHandler : public Handler {
 public:
  InequalityHandler(CheckSpec spec, Coupling mu) : Handler(std::move(spec)), monitor_(mu) {}
  void observe(double t, SliceQuantities& q, const RowValues&) override {
    monitor_.observe(t, q.u());
  }
  std::vector<CheckReport> finish(const Handler*) const override {
    CheckReport r = monitor_.finish();
    if (auto v = spec_.optional_number("max_ratio")) r.max_fitted = v;
    return {thresholds(r)};
  }

 private:
  InteractionInequalityMonitor monitor_;
};

class QuarticHandler : public Handler {
 public:
  QuarticHandler(CheckSpec spec, const Grid& grid, double n_star)
      : Handler(std::move(spec)), n_star_(n_star), monitor_(grid, n_star) {}
  void observe(double t, SliceQuantities& q, const RowValues&) override {
    monitor_.observe(t, q.u());
  }
  std::vector<CheckReport> finish(const Handler*) const override {
    CheckReport r = CheckReport::from_norms("", 0.0, 1.0);
    r.fitted_constant = monitor_.value() * n_star_ * n_star_ * n_star_;
    r.metadata["value"] = fmt_double(monitor_.value());
    r.metadata["n_star"] = fmt_double(n_star_);
    return {thresholds(r)};
  }

 private:
  double n_star_;
  FrequencyQuarticMonitor monitor_;
};

class PseudoconformalHandler : public Handler {
 public:
  PseudoconformalHandler(CheckSpec spec, Coupling mu)
      : Handler(std::move(spec)), monitor_(mu, spec_.number("support_tolerance", 1e-8)) {}
  void observe(double t, SliceQuantities& q, const RowValues&) override {
    monitor_.observe(t, q.u());
  }
  std::vector<CheckReport> finish(const Handler* coarse) const override {
    CheckReport r = monitor_.finish();
    if (coarse) attach_order(r, static_cast<const PseudoconformalHandler*>(coarse)->monitor_.finish());
    return {thresholds(r)};
  }

 private:
  PseudoconformalMonitor monitor_;
};

double exponent(const CheckSpec& c, const std::string& key, double fallback) {
  const std::string v = c.text(key, "");
  if (v == "inf" || v == "infinity") return kInfinity;
  return c.number(key, fallback);
}

class SpacetimeHandler : public Handler {
 public:
  explicit SpacetimeHandler(CheckSpec spec) : Handler(std::move(spec)), monitor_(make()) {}
  void observe(double t, SliceQuantities& q, const RowValues&) override {
    monitor_.observe(t, q.u());
  }
  std::vector<CheckReport> finish(const Handler*) const override {
    CheckReport r = CheckReport::from_norms("", 0.0, 1.0);
    r.fitted_constant = monitor_.value();
    return {thresholds(r)};
  }

 private:
  SpacetimeNormSpec make() const {
    SpacetimeNormSpec s;
    s.q = exponent(spec_, "q", 2.0);
    s.r = exponent(spec_, "r", 2.0);
    s.derivative = static_cast<int>(spec_.number("k", 0.0));
    if (auto b = spec_.optional_number("band")) s.band = DyadicBand::at(*b);
    return s;
  }
  SpacetimeNormMonitor monitor_;
};

class StrichartzHandler : public Handler {
 public:
  StrichartzHandler(CheckSpec spec, const Grid& grid)
      : Handler(std::move(spec)), monitor_(grid, static_cast<int>(spec_.number("k", 0.0))) {}
  void observe(double t, SliceQuantities& q, const RowValues&) override {
    monitor_.observe(t, q.u());
  }
  std::vector<CheckReport> finish(const Handler*) const override {
    CheckReport r = CheckReport::from_norms("", 0.0, 1.0);
    const std::vector<double> c = monitor_.components();
    r.fitted_constant = *std::max_element(c.begin(), c.end());
    std::string list;
    for (std::size_t i = 0; i < c.size(); ++i) list += (i ? "," : "") + fmt_double(c[i]);
    r.metadata["pair_values"] = list;
    return {thresholds(r)};
  }

 private:
  StrichartzMonitor monitor_;
};

class ScatteringHandler : public Handler {
 public:
  ScatteringHandler(CheckSpec spec, const SimulationConfig& config)
      : Handler(std::move(spec)), mu_(config.mu), from_(0.75 * config.t_end) {}
  void observe(double t, SliceQuantities& q, const RowValues&) override {
    if (!u0_) u0_ = q.u();
    if (t >= from_ - 1e-12 * std::max(1.0, from_)) {
      times_.push_back(t);
      records_.push_back(q.u());
    }
  }
  std::vector<CheckReport> finish(const Handler*) const override {
    CheckReport r =
        scattering_report(times_, records_, *u0_, mu_, spec_.number("smallness", 1.0));
    return {thresholds(r)};
  }

 private:
  Coupling mu_;
  double from_;
  std::optional<ComplexField> u0_;
  std::vector<double> times_;
  std::vector<ComplexField> records_;
};

MorawetzWeight weight_for(const CheckSpec& c, const Scenario& s) {
  const Vec3 center = c.vector("center", {0.0, 0.0, 0.0});
  const std::string kind = c.text("weight", "localized");
  if (kind == "quadratic") return MorawetzWeight::quadratic(center);
  if (kind != "localized") throw ParseError("check " + c.label + ": weight must be localized or quadratic");
  return MorawetzWeight(center, c.number("radius", s.diagnostic_radius()));
}

WeightMode mode_for(const CheckSpec& c) {
  const std::string m = c.text("mode", "spectral");
  if (m == "spectral") return WeightMode::Spectral;
  if (m == "lattice") return WeightMode::Lattice;
  throw ParseError("check " + c.label + ": mode must be spectral or lattice");
}

std::unique_ptr<Handler> make_handler(const CheckSpec& c, const Scenario& s, const Grid& g) {
  const Coupling mu = s.config.mu;
  const std::string& t = c.type;
  using K = DriftHandler::Kind;
  if (t == "mass_drift") return std::make_unique<DriftHandler>(c, K::Mass);
  if (t == "momentum_drift") return std::make_unique<DriftHandler>(c, K::Momentum);
  if (t == "energy_drift") return std::make_unique<DriftHandler>(c, K::Energy);
  if (t == "bracket_cancellation") return std::make_unique<BracketHandler>(c);
  if (t == "local_mass") return std::make_unique<MonitorHandler>(c, local_mass_monitor(mu));
  if (t == "local_momentum") return std::make_unique<MonitorHandler>(c, local_momentum_monitor(mu));
  if (t == "local_energy") return std::make_unique<MonitorHandler>(c, local_energy_monitor(mu));
  if (t == "frequency_localized_mass") {
    const double n_cut = c.number("n_cut", resolvable_bands(g).back() / 2.0);
    return std::make_unique<MonitorHandler>(
        c, frequency_localized_mass_monitor(DyadicBand::above_eq(n_cut), mu));
  }
  if (t == "virial" || t == "vdot") {
    const MorawetzWeight w = weight_for(c, s);
    const WeightMode mode = mode_for(c);
    (void)w.fields(g, mode);  // validates the radius against the grid
    return std::make_unique<MonitorHandler>(
        c, t == "virial" ? virial_monitor(w, mu, mode) : vdot_monitor(w, mu, mode));
  }
  const double radius = c.number("radius", s.diagnostic_radius());
  if (t == "interaction_derivative") {
    require_kernel_fits(g, radius);
    return std::make_unique<MonitorHandler>(c, interaction_derivative_monitor(radius, mu));
  }
  if (t == "interaction_bound") {
    require_kernel_fits(g, radius);
    return std::make_unique<InteractionBoundHandler>(c, radius);
  }
  if (t == "interaction_inequality") return std::make_unique<InequalityHandler>(c, mu);
  if (t == "frequency_localized_quartic") {
    return std::make_unique<QuarticHandler>(c, g,
                                            c.number("n_star", resolvable_bands(g).back() / 4.0));
  }
  if (t == "pseudoconformal") {
    if (mu == Coupling::Focusing) {
      throw ContractViolation("the pseudoconformal check needs defocusing or free data");
    }
    return std::make_unique<PseudoconformalHandler>(c, mu);
  }
  if (t == "spacetime_norm") return std::make_unique<SpacetimeHandler>(c);
  if (t == "strichartz") return std::make_unique<StrichartzHandler>(c, g);
  if (t == "scattering") return std::make_unique<ScatteringHandler>(c, s.config);
  throw ParseError("unknown check type " + t);
}

// Per-record diagnostics, CSV rows and checks of one evolution.
class Pipeline {
 public:
  Pipeline(const Scenario& s, const Grid& g, std::ostream* csv)
      : scenario_(s),
        grid_(g),
        csv_(csv),
        weight_(s.diagnostics.center, s.diagnostic_radius()) {
    require_kernel_fits(g, s.diagnostic_radius());
    (void)weight_.fields(g);
    for (const auto& c : s.checks) handlers_.push_back(make_handler(c, s, g));
    if (csv_) {
      std::string header;
      for (const auto& c : csv_columns()) header += (header.empty() ? "" : ",") + c;
      for (double b : s.diagnostics.band_masses) header += ",band_mass_" + fmt_double(b);
      *csv_ << header << '\n';
      csv_->flush();
    }
  }

  void observe(double t, const ComplexField& u) {
    SliceQuantities q(u, scenario_.config.mu);
    RowValues row;
    row.mass = total_mass(u);
    row.energy = total_energy(u, scenario_.config.mu);
    row.momentum = total_momentum(u);
    last_ = row;
    if (csv_) write_row(t, u, row);
    for (auto& h : handlers_) h->observe(t, q, row);
  }

  std::vector<CheckReport> finish(const Pipeline* coarse) const {
    std::vector<CheckReport> out;
    for (std::size_t i = 0; i < handlers_.size(); ++i) {
      auto r = handlers_[i]->finish(coarse ? coarse->handlers_[i].get() : nullptr);
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }

  const RowValues& last() const { return last_; }

 private:
  void write_row(double t, const ComplexField& u, const RowValues& row) {
    const double radius = scenario_.diagnostic_radius();
    std::vector<std::string> cells = {
        fmt_double(t),
        fmt_double(row.mass),
        fmt_double(row.energy),
        fmt_double(row.momentum[0]),
        fmt_double(row.momentum[1]),
        fmt_double(row.momentum[2]),
        fmt_double(virial_potential(u, weight_)),
        fmt_double(morawetz_action(u, weight_)),
        fmt_double(interaction_potential(u, radius)),
        fmt_double(sobolev_norm(u, 0.5, true))};
    if (scenario_.diagnostics.breakdown) {
      const InteractionTermBreakdown b = interaction_breakdown(u, radius, scenario_.config.mu);
      for (double v : {b.quartic_term, b.quartic_kernel_term, b.angular_term,
                       b.momentum_bracket_term, b.cross_term, b.error_band_term,
                       b.mass_bracket_term, b.remainder_term}) {
        cells.push_back(fmt_double(v));
      }
    } else {
      cells.insert(cells.end(), 8, "");
    }
    for (double b : scenario_.diagnostics.band_masses) {
      const double m = l2_norm(lp_project(u, DyadicBand::above_eq(b)));
      cells.push_back(fmt_double(m * m));
    }
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
    *csv_ << line << '\n';
    csv_->flush();
  }

  const Scenario& scenario_;
  Grid grid_;
  std::ostream* csv_;
  MorawetzWeight weight_;
  std::vector<std::unique_ptr<Handler>> handlers_;
  RowValues last_;
};

SimulationConfig companion_config(const SimulationConfig& c) {
  SimulationConfig out = c;
  out.dt = 2.0 * c.dt;
  return out;
}

std::string checkpoint_name(std::size_t record) { return fmt::format("rec_{:06d}.bin", record); }

struct Evolution {
  std::string status = "pass";
  std::string message;
  double last_valid_time = 0.0;
};

// Evolves one configuration into `dir`, feeding `pipeline`.
Evolution evolve_into(const Scenario& s, const SimulationConfig& config, const fs::path& dir,
                      Pipeline& pipeline) {
  Evolution e;
  const int stride = s.output.checkpoint_stride;
  if (stride > 0) fs::create_directories(dir / "checkpoints");
  EvolveOptions options;
  options.keep_series = false;
  options.on_record = [&](std::size_t record, double t, const ComplexField& u) {
    pipeline.observe(t, u);
    if (stride > 0 && record % static_cast<std::size_t>(stride) == 0) {
      write_checkpoint((dir / "checkpoints" / checkpoint_name(record)).string(), u, t, config.mu);
    }
    e.last_valid_time = t;
  };
  try {
    evolve(config, options);
  } catch (const NumericalBlowUp& b) {
    e.status = "blow_up";
    e.message = b.what();
    e.last_valid_time = b.last_valid_time();
  }
  return e;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json reports_json(const std::string& name, const std::string& status,
                  const std::vector<CheckReport>& reports) {
  json j;
  j["scenario"] = name;
  j["status"] = status;
  j["reports"] = json::array();
  for (const auto& r : reports) j["reports"].push_back(r.to_json());
  return j;
}

void write_manifest(const fs::path& dir, const Scenario& s, const RunResult& r,
                    const Evolution* fine) {
  json m;
  m["format_version"] = 1;
  m["csv_version"] = kCsvVersion;
  m["code_version"] = CNLS_VERSION;
  m["scenario_name"] = s.name;
  m["scenario_hash"] = sha256_hex(s.text);
  m["seeds"] = {{"initial", s.config.initial.seed}};
  const double h = s.config.box_length / s.config.n;
  m["grid"] = {{"n", s.config.n}, {"box_length", s.config.box_length}, {"spacing", h}};
  m["dt"] = s.config.dt;
  m["t_end"] = s.config.t_end;
  m["record_stride"] = s.config.record_stride;
  m["mu"] = static_cast<int>(s.config.mu);
  m["wraparound_horizon"] = s.config.box_length * h / (4.0 * std::numbers::pi);
  m["companion"] = s.output.companion;
  m["checkpoint_stride"] = s.output.checkpoint_stride;
  m["status"] = r.status;
  m["exit_code"] = r.exit_code;
  m["message"] = r.message;
  if (fine) m["last_valid_time"] = fine->last_valid_time;
  json files = json::array();
  std::vector<fs::path> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json") {
      paths.push_back(fs::relative(entry.path(), dir));
    }
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    files.push_back({{"path", p.generic_string()},
                     {"bytes", fs::file_size(dir / p)},
                     {"sha256", sha256_file((dir / p).string())}});
  }
  m["files"] = files;
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

// Builds everything that can fail on a bad scenario, without evolving.
void preflight(const Scenario& s) {
  const Grid g = s.config.grid();
  const ComplexField u0 = make_initial(g, s.config.initial);
  s.config.validate(u0);
  if (s.output.companion) companion_config(s.config).validate(u0);
  Pipeline probe(s, g, nullptr);
}

}  // namespace

RunResult run_scenario(const Scenario& input, const RunOptions& options) {
  Scenario s = input;
  if (options.seed) {
    s.config.initial.seed = *options.seed;
  }
  RunResult r;
  r.run_dir = options.out_dir;
  const fs::path dir(options.out_dir);
  try {
    fs::create_directories(dir);
  } catch (const std::exception& e) {
    r.exit_code = kExitConfigError;
    r.status = "config_error";
    r.message = e.what();
    return r;
  }
  for (const char* stale : {"timeseries.csv", "reports.json", "manifest.json"}) {
    fs::remove(dir / stale);
  }
  fs::remove_all(dir / "checkpoints");
  fs::remove_all(dir / "companion");
  write_text(dir / "scenario.ini", to_ini(s));

  Evolution fine_evolution;
  try {
    preflight(s);
    const Grid g = s.config.grid();
    std::ofstream csv(dir / "timeseries.csv", std::ios::binary);
    Pipeline fine(s, g, &csv);
    fine_evolution = evolve_into(s, s.config, dir, fine);
    std::optional<Pipeline> coarse;
    Evolution coarse_evolution;
    if (fine_evolution.status == "pass" && s.output.companion) {
      fs::create_directories(dir / "companion");
      std::ofstream coarse_csv(dir / "companion" / "timeseries.csv", std::ios::binary);
      coarse.emplace(s, g, &coarse_csv);
      coarse_evolution = evolve_into(s, companion_config(s.config), dir / "companion", *coarse);
    }
    if (fine_evolution.status != "pass" || coarse_evolution.status != "pass") {
      const Evolution& bad = fine_evolution.status != "pass" ? fine_evolution : coarse_evolution;
      r.exit_code = kExitBlowUp;
      r.status = "blow_up";
      r.message = bad.message;
    } else {
      r.reports = fine.finish(coarse ? &*coarse : nullptr);
      const bool ok = std::all_of(r.reports.begin(), r.reports.end(),
                                  [](const CheckReport& c) { return c.passed(); });
      r.exit_code = ok ? kExitPass : kExitCheckFailed;
      r.status = ok ? "pass" : "check_failed";
    }
    r.final_mass = fine.last().mass;
    r.final_energy = fine.last().energy;
  } catch (const ParseError& e) {
    r.exit_code = kExitConfigError;
    r.status = "config_error";
    r.message = e.what();
  } catch (const Error& e) {
    r.exit_code = kExitConfigError;
    r.status = "config_error";
    r.message = e.what();
  }
  write_text(dir / "reports.json", reports_json(s.name, r.status, r.reports).dump(2) + "\n");
  write_manifest(dir, s, r, &fine_evolution);
  return r;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<fs::path> checkpoint_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::exists(dir)) return files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".bin") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

double relative_difference(double a, double b) {
  if (a == b) return 0.0;
  if (!std::isfinite(a) || !std::isfinite(b)) return HUGE_VAL;
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

double compare_optional(const json& a, const json& b, const char* key) {
  const bool na = !a.contains(key) || a.at(key).is_null();
  const bool nb = !b.contains(key) || b.at(key).is_null();
  if (na || nb) return na == nb ? 0.0 : HUGE_VAL;
  return relative_difference(a.at(key).get<double>(), b.at(key).get<double>());
}

}  // namespace

VerifyResult verify_run(const std::string& run_dir) {
  VerifyResult v;
  const fs::path dir(run_dir);
  json manifest;
  try {
    manifest = json::parse(read_text(dir / "manifest.json"));
  } catch (const std::exception& e) {
    v.exit_code = kExitConfigError;
    v.message = std::string("no readable manifest: ") + e.what();
    return v;
  }
  for (const auto& f : manifest.at("files")) {
    const fs::path p = dir / f.at("path").get<std::string>();
    if (!fs::exists(p)) {
      const bool checkpoint = f.at("path").get<std::string>().find("checkpoints/") != std::string::npos;
      v.exit_code = checkpoint ? kExitConfigError : kExitCheckFailed;
      v.message = "missing file " + f.at("path").get<std::string>();
      return v;
    }
    if (sha256_file(p.string()) != f.at("sha256").get<std::string>()) {
      const bool checkpoint = f.at("path").get<std::string>().find("checkpoints/") != std::string::npos;
      v.exit_code = checkpoint ? kExitConfigError : kExitCheckFailed;
      v.message = "hash mismatch: " + f.at("path").get<std::string>() + " was modified";
      return v;
    }
  }
  if (manifest.at("checkpoint_stride").get<int>() != 1) {
    v.exit_code = kExitConfigError;
    v.message = "verify needs a checkpoint at every record (checkpoint_stride = 1)";
    return v;
  }

  try {
    const Scenario s = parse_scenario(read_text(dir / "scenario.ini"));
    const Grid g = s.config.grid();
    auto replay = [&](const fs::path& sub, Pipeline& p) {
      const auto files = checkpoint_files(sub / "checkpoints");
      if (files.empty()) throw Error("no checkpoints under " + sub.string());
      for (const auto& f : files) {
        const Checkpoint c = read_checkpoint(f.string());
        if (!(c.field.grid() == g)) throw Error("checkpoint grid differs from the scenario");
        p.observe(c.time, c.field);
      }
    };
    std::ostringstream csv;
    Pipeline fine(s, g, &csv);
    replay(dir, fine);
    if (csv.str() != read_text(dir / "timeseries.csv")) {
      v.exit_code = kExitCheckFailed;
      v.message = "timeseries.csv differs from the replayed checkpoints";
      return v;
    }
    const std::string status = manifest.at("status").get<std::string>();
    if (status == "blow_up" || status == "config_error") {
      v.message = "status " + status + ": time series verified, no reports to compare";
      return v;
    }
    std::optional<Pipeline> coarse;
    std::ostringstream coarse_csv;
    if (s.output.companion) {
      coarse.emplace(s, g, &coarse_csv);
      replay(dir / "companion", *coarse);
      if (coarse_csv.str() != read_text(dir / "companion" / "timeseries.csv")) {
        v.exit_code = kExitCheckFailed;
        v.message = "companion/timeseries.csv differs from the replayed checkpoints";
        return v;
      }
    }
    const std::vector<CheckReport> again = fine.finish(coarse ? &*coarse : nullptr);
    const json stored = json::parse(read_text(dir / "reports.json")).at("reports");
    if (stored.size() != again.size()) {
      v.exit_code = kExitCheckFailed;
      v.message = "report count differs";
      return v;
    }
    for (std::size_t i = 0; i < again.size(); ++i) {
      const json a = again[i].to_json();
      const json& b = stored[i];
      if (a.at("name") != b.at("name") || a.at("passed") != b.at("passed")) {
        v.exit_code = kExitCheckFailed;
        v.message = "report " + a.at("name").get<std::string>() + " differs";
        return v;
      }
      for (const char* key : {"relative_residual", "residual_norm", "reference_norm",
                              "convergence_order", "fitted_constant"}) {
        v.max_drift = std::max(v.max_drift, compare_optional(a, b, key));
      }
    }
    if (v.max_drift > 1e-13) {
      v.exit_code = kExitCheckFailed;
      v.message = fmt::format("reports drift by {:.3e} relative", v.max_drift);
      return v;
    }
    v.message = fmt::format("{} reports reproduced, max drift {:.3e}", again.size(), v.max_drift);
  } catch (const ParseError& e) {
    v.exit_code = kExitConfigError;
    v.message = e.what();
  } catch (const Error& e) {
    v.exit_code = kExitConfigError;
    v.message = e.what();
  }
  return v;
}

// ---------------------------------------------------------------------------

SweepAxis parse_axis(const std::string& name) {
  if (name == "dt") return SweepAxis::Dt;
  if (name == "n") return SweepAxis::N;
  if (name == "lambda" || name == "λ") return SweepAxis::Lambda;
  if (name == "R") return SweepAxis::Radius;
  if (name == "N_star") return SweepAxis::NStar;
  throw ParseError("unknown sweep axis '" + name + "' (dt, n, lambda, R, N_star)");
}

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Dt: return "dt";
    case SweepAxis::N: return "n";
    case SweepAxis::Lambda: return "lambda";
    case SweepAxis::Radius: return "R";
    case SweepAxis::NStar: return "N_star";
  }
  return "";
}

Scenario apply_axis(const Scenario& scenario, SweepAxis axis, double value) {
  Scenario s = scenario;
  auto scale_param = [](CheckSpec& c, const std::string& key, double factor) {
    if (c.has(key)) c.params[key] = fmt_double(c.number(key, 0.0) * factor);
  };
  switch (axis) {
    case SweepAxis::Dt:
      s.config.dt = value;
      break;
    case SweepAxis::N:
      if (value != std::round(value)) throw ParseError("n must be an integer");
      s.config.n = static_cast<int>(value);
      break;
    case SweepAxis::Lambda: {
      const double radius = s.diagnostic_radius();
      s.config = rescale_config(s.config, value);
      s.diagnostics.radius = radius * value;
      for (double& c : s.diagnostics.center) c *= value;
      for (double& b : s.diagnostics.band_masses) b /= value;
      for (auto& c : s.checks) {
        if (c.has("center")) {
          const Vec3 v = c.vector("center", {0, 0, 0});
          c.params["center"] = fmt::format("{},{},{}", fmt_double(v[0] * value),
                                           fmt_double(v[1] * value), fmt_double(v[2] * value));
        }
        scale_param(c, "radius", value);
        for (const char* key : {"n_star", "n_cut", "band"}) scale_param(c, key, 1.0 / value);
      }
      break;
    }
    case SweepAxis::Radius:
      s.diagnostics.radius = value;
      for (auto& c : s.checks) {
        if (c.type == "virial" || c.type == "vdot" || c.type == "interaction_derivative" ||
            c.type == "interaction_bound") {
          c.params["radius"] = fmt_double(value);
        }
      }
      break;
    case SweepAxis::NStar:
      for (auto& c : s.checks) {
        if (c.type == "frequency_localized_quartic") c.params["n_star"] = fmt_double(value);
      }
      break;
  }
  s.text = to_ini(s);
  return s;
}

SweepResult run_sweep(const Scenario& scenario, SweepAxis axis, const std::vector<double>& values,
                      const std::string& out_dir, int threads) {
  SweepResult result;
  std::vector<Scenario> members;
  try {
    for (double v : values) {
      members.push_back(apply_axis(scenario, axis, v));
      preflight(members.back());
    }
  } catch (const Error& e) {
    result.exit_code = kExitConfigError;
    RunResult r;
    r.exit_code = kExitConfigError;
    r.status = "config_error";
    r.message = e.what();
    result.runs.push_back(r);
    return result;
  }
  fs::create_directories(out_dir);
  result.runs.resize(members.size());
  const std::size_t width = static_cast<std::size_t>(std::max(1, threads));
  for (std::size_t start = 0; start < members.size(); start += width) {
    std::vector<std::future<RunResult>> batch;
    for (std::size_t i = start; i < std::min(members.size(), start + width); ++i) {
      const std::string dir = (fs::path(out_dir) / fmt::format("{}_{}", axis_name(axis), i)).string();
      batch.push_back(std::async(std::launch::async, [&members, i, dir] {
        return run_scenario(members[i], RunOptions{dir, std::nullopt});
      }));
    }
    for (std::size_t k = 0; k < batch.size(); ++k) result.runs[start + k] = batch[k].get();
  }

  // Aggregated table: one row per (value, report), plus final mass and energy.
  struct Row {
    double value;
    std::size_t run;
    CheckReport report;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const RunResult& r = result.runs[i];
    for (const auto& rep : r.reports) rows.push_back({values[i], i, rep});
    CheckReport m, e;
    m.name = "final_mass";
    m.fitted_constant = r.final_mass;
    e.name = "final_energy";
    e.fitted_constant = r.final_energy;
    rows.push_back({values[i], i, m});
    rows.push_back({values[i], i, e});
    result.exit_code = std::max(result.exit_code, r.exit_code);
  }
  auto cell = [](const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); };
  auto log_slope = [](double y0, double y1, double x0, double x1) -> std::string {
    if (y0 == 0.0 || y1 == 0.0 || x0 == x1) return "";
    return fmt_double(std::log(std::abs(y1 / y0)) / std::log(x1 / x0));
  };
  std::string table =
      "axis,value,run,exit_code,check,relative_residual,convergence_order,fitted_constant,"
      "passed,residual_slope,fitted_slope\n";
  for (const auto& row : rows) {
    std::string rs, fs_;
    for (const auto& prev : rows) {
      if (prev.run + 1 == row.run && prev.report.name == row.report.name) {
        rs = log_slope(prev.report.relative_residual, row.report.relative_residual, prev.value,
                       row.value);
        if (prev.report.fitted_constant && row.report.fitted_constant) {
          fs_ = log_slope(*prev.report.fitted_constant, *row.report.fitted_constant, prev.value,
                          row.value);
        }
      }
    }
    const RunResult& r = result.runs[row.run];
    table += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", axis_name(axis),
                         fmt_double(row.value), fs::path(r.run_dir).filename().string(),
                         r.exit_code, row.report.name, fmt_double(row.report.relative_residual),
                         cell(row.report.convergence_order), cell(row.report.fitted_constant),
                         row.report.passed() ? "true" : "false", rs, fs_);
  }
  result.table_path = (fs::path(out_dir) / "sweep.csv").string();
  write_text(result.table_path, table);
  return result;
}

// ---------------------------------------------------------------------------

CheckReport scattering_report(const std::vector<double>& times,
                              const std::vector<ComplexField>& records, const ComplexField& u0,
                              Coupling mu, double smallness) {
  if (records.empty() || records.size() != times.size()) {
    throw ContractViolation("scattering probe needs records from the last quarter");
  }
  const double energy = total_energy(u0, mu);
  if (energy > smallness) {
    throw ContractViolation(fmt::format(
        "scattering probe refuses large data: energy {} exceeds the smallness threshold {}",
        energy, smallness));
  }
  const double reference = sobolev_norm(u0, 1.0, true);
  const double t_final = times.back();
  std::vector<double> distance;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ComplexField free = free_propagate(records.back(), times[i] - t_final);
    distance.push_back(sobolev_norm(add(records[i], free, -1.0), 1.0, true) / reference);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < distance.size(); ++i) {
    if (distance[i] > distance[i - 1] * (1.0 + 1e-9) + 1e-15) monotone = false;
  }
  const double worst = *std::max_element(distance.begin(), distance.end());
  CheckReport r = CheckReport::from_norms("scattering", worst * reference, reference);
  r.fitted_constant = worst;
  r.metadata["non_increasing"] = monotone ? "true" : "false";
  r.metadata["energy"] = fmt_double(energy);
  r.metadata["from_time"] = fmt_double(times.front());
  std::string list;
  for (std::size_t i = 0; i < distance.size(); ++i) list += (i ? "," : "") + fmt_double(distance[i]);
  r.metadata["distances"] = list;
  return r;
}

CheckReport scattering_compare(const std::string& run_dir, double smallness) {
  const fs::path dir(run_dir);
  const Scenario s = parse_scenario(read_text(dir / "scenario.ini"));
  const auto files = checkpoint_files(dir / "checkpoints");
  if (files.empty()) throw ContractViolation("scattering_compare needs checkpoints");
  const Checkpoint first = read_checkpoint(files.front().string());
  if (first.time != 0.0) throw ContractViolation("the initial record has no checkpoint");
  std::vector<double> times;
  std::vector<ComplexField> records;
  const double from = 0.75 * s.config.t_end;
  for (const auto& f : files) {
    Checkpoint c = read_checkpoint(f.string());
    if (c.time >= from - 1e-12 * std::max(1.0, from)) {
      times.push_back(c.time);
      records.push_back(std::move(c.field));
    }
  }
  const double expected = s.config.t_end;
  if (times.empty() || std::abs(times.back() - expected) > 1e-9 * std::max(1.0, expected)) {
    throw ContractViolation("the final record has no checkpoint");
  }
  return scattering_report(times, records, first.field, s.config.mu, smallness);
}

}  // namespace cnls
