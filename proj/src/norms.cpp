#include "cnls/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cnls/error.hpp"
#include "cnls/format.hpp"
#include "cnls/spectral.hpp"
#include "cnls/summation.hpp"

namespace cnls {
namespace {

constexpr double kPi = std::numbers::pi;

// |grad^k P u| pointwise from the spectrum of u.
RealBuffer derivative_magnitude(const ComplexField& spectrum, int k,
                                const std::optional<DyadicBand>& band) {
  if (k < 0 || k > 2) throw ContractViolation("derivative order must be 0, 1 or 2");
  const ComplexField base =
      band ? lp_project(spectrum, *band, Representation::Spectral) : spectrum;
  RealBuffer out(base.size(), 0.0);
  auto accumulate = [&](const ComplexField& f, double weight) {
    const ComplexField s = f.is_spatial() ? f : to_spatial(f);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += weight * std::norm(s[i]);
  };
  if (k == 0) {
    accumulate(base, 1.0);
  } else if (k == 1) {
    for (int j = 0; j < 3; ++j) accumulate(derivative(base, j, Representation::Spectral), 1.0);
  } else {
    for (int j = 0; j < 3; ++j) {
      const ComplexField dj = derivative(base, j, Representation::Spectral);
      for (int l = j; l < 3; ++l) {
        accumulate(derivative(dj, l, Representation::Spectral), j == l ? 1.0 : 2.0);
      }
    }
  }
  for (double& v : out) v = std::sqrt(v);
  return out;
}

ComplexField spectrum_of(const ComplexField& u) {
  return u.is_spatial() ? to_spectral(u) : u;
}

double spatial_norm(const RealBuffer& g, double r, double cell) {
  if (std::isinf(r)) return g.empty() ? 0.0 : *std::max_element(g.begin(), g.end());
  const double s = pairwise_sum(g.size(), [&](std::size_t i) { return std::pow(g[i], r); });
  return std::pow(cell * s, 1.0 / r);
}

// Trapezoid L^q over records of per-record spatial norms.
double time_norm(const std::vector<double>& values, double q, double dt) {
  if (std::isinf(q)) return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  const std::size_t n = values.size();
  const double s = pairwise_sum(n, [&](std::size_t i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    return w * std::pow(values[i], q);
  });
  return std::pow(dt * s, 1.0 / q);
}

// Common spacing of the record times; q = inf tolerates a single record.
double uniform_spacing_of(const std::vector<double>& t, double q) {
  if (t.empty()) throw ContractViolation("spacetime norm without records");
  if (t.size() < 2) {
    if (std::isinf(q)) return 0.0;
    throw ContractViolation("a finite time exponent needs at least two records");
  }
  const double dt = t[1] - t[0];
  for (std::size_t i = 2; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - dt) > 1e-9 * std::abs(dt)) {
      throw ContractViolation("records are not uniformly spaced");
    }
  }
  return dt;
}

void require_exponents(double q, double r) {
  if (!(q >= 1.0) || !(r >= 1.0)) throw ContractViolation("spacetime exponents must be >= 1");
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

AdmissiblePair AdmissiblePair::make(double q, double r) {
  const double defect = (std::isinf(q) ? 0.0 : 2.0 / q) + 3.0 / r - 1.5;
  if (!(q >= 2.0) || !(r >= 2.0 && r <= 6.0) || std::abs(defect) > 1e-12) {
    throw ContractViolation(
        fmt::format("({}, {}) is not admissible: 2/q + 3/r - 3/2 = {}", q, r, defect));
  }
  return {q, r};
}

const std::vector<AdmissiblePair>& listed_admissible_pairs() {
  static const std::vector<AdmissiblePair> pairs = {
      AdmissiblePair::make(kInfinity, 2.0),        AdmissiblePair::make(10.0, 30.0 / 13.0),
      AdmissiblePair::make(5.0, 30.0 / 11.0),      AdmissiblePair::make(4.0, 3.0),
      AdmissiblePair::make(10.0 / 3.0, 10.0 / 3.0), AdmissiblePair::make(2.0, 6.0)};
  return pairs;
}

SpacetimeNormMonitor::SpacetimeNormMonitor(SpacetimeNormSpec spec) : spec_(std::move(spec)) {
  require_exponents(spec_.q, spec_.r);
}

void SpacetimeNormMonitor::observe(double t, const ComplexField& u) {
  times_.push_back(t);
  const double cell = u.grid().cell_volume();
  if (spec_.derivative == 0 && !spec_.band) {
    const ComplexField s = u.is_spatial() ? u : to_spatial(u);
    RealBuffer g(s.size());
    for (std::size_t x = 0; x < g.size(); ++x) g[x] = std::abs(s[x]);
    values_.push_back(spatial_norm(g, spec_.r, cell));
  } else {
    values_.push_back(
        spatial_norm(derivative_magnitude(spectrum_of(u), spec_.derivative, spec_.band), spec_.r,
                     cell));
  }
}

double SpacetimeNormMonitor::value() const {
  return time_norm(values_, spec_.q, uniform_spacing_of(times_, spec_.q));
}

double spacetime_norm(const FieldSeries& series, const SpacetimeNormSpec& spec) {
  if (series.empty()) throw ContractViolation("spacetime norm of an empty series");
  SpacetimeNormMonitor m(spec);
  for (std::size_t i = 0; i < series.size(); ++i) m.observe(series.time(i), series[i]);
  return m.value();
}

StrichartzMonitor::StrichartzMonitor(const Grid& grid, int k)
    : k_(k),
      bands_(lattice_bands(grid)),
      values_(listed_admissible_pairs().size(), std::vector<std::vector<double>>(bands_.size())) {
  if (k < 0 || k > 2) throw ContractViolation("derivative order must be 0, 1 or 2");
}

void StrichartzMonitor::observe(double t, const ComplexField& u) {
  const auto& pairs = listed_admissible_pairs();
  const double cell = u.grid().cell_volume();
  times_.push_back(t);
  const ComplexField spectrum = spectrum_of(u);
  for (std::size_t b = 0; b < bands_.size(); ++b) {
    const RealBuffer g = derivative_magnitude(spectrum, k_, DyadicBand::at(bands_[b]));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      values_[p][b].push_back(spatial_norm(g, pairs[p].r, cell));
    }
  }
}

std::vector<double> StrichartzMonitor::components() const {
  const auto& pairs = listed_admissible_pairs();
  const double dt = uniform_spacing_of(times_, 2.0);
  std::vector<double> out;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    double s = 0.0;
    for (std::size_t b = 0; b < bands_.size(); ++b) {
      const double v = time_norm(values_[p][b], pairs[p].q, dt);
      s += v * v;
    }
    out.push_back(std::sqrt(s));
  }
  return out;
}

double StrichartzMonitor::value() const {
  const std::vector<double> c = components();
  return *std::max_element(c.begin(), c.end());
}

std::vector<double> strichartz_components(const FieldSeries& series, int k) {
  if (series.empty()) throw ContractViolation("Strichartz norm of an empty series");
  StrichartzMonitor m(series.grid(), k);
  for (std::size_t i = 0; i < series.size(); ++i) m.observe(series.time(i), series[i]);
  return m.components();
}

double strichartz_s_norm(const FieldSeries& series, int k) {
  const std::vector<double> c = strichartz_components(series, k);
  return *std::max_element(c.begin(), c.end());
}

// ---------------------------------------------------------------------------

namespace {

// Min-image distance from p to the nearest lattice image of the origin.
double image_distance(Vec3 p, double length) {
  double d2 = 0.0;
  for (double c : p) {
    c -= length * std::round(c / length);
    d2 += c * c;
  }
  return std::sqrt(d2);
}

ComplexField unit_l2(ComplexField f) {
  const ComplexField s = f.is_spatial() ? f : to_spatial(f);
  const double norm = l2_norm(s);
  return scale(f, 1.0 / norm);
}

}  // namespace

CheckReport bilinear_strichartz_experiment(const BilinearOptions& o) {
  const Grid grid(o.n, o.box_length);
  const double length = o.box_length;
  const double wf = o.packet_width * length, wg = o.companion_width * length;
  // |f|^2 |g|^2 overlap of two Gaussians at separation s decays like
  // exp(-2 s^2 / (wf^2 + wg^2)), which is e^{-16} at the clearance.
  const double clearance = 4.0 * std::sqrt(0.5 * (wf * wf + wg * wg));
  const Vec3 direction{2.0, 3.0, 6.0};  // |(2, 3, 6)| = 7

  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> arg(0.0, 2.0 * kPi);

  InitialCondition lump{"gaussian", {{"amplitude", 1.0}, {"width", wg}}, 0};
  ComplexField g0 = o.companion_zero ? ComplexField(grid, Representation::Spatial)
                                     : unit_l2(make_initial(grid, lump));
  g0 = scale(g0, std::polar(1.0, arg(rng)));
  const ComplexField g_hat = to_spectral(g0);

  double worst_return = length;
  for (int m : o.multiples) {
    const double n_hi = 8.0 * m / length;
    if (n_hi > grid.nyquist_frequency() * (1.0 + 1e-12)) {
      throw ContractViolation(fmt::format("band N_hi = {} is not resolvable", n_hi));
    }
    const double speed = 4.0 * kPi * 7.0 * m / length;  // group velocity 4 pi |xi|
    // The packet leaves the lump after clearance / speed and must not come
    // back near any image of it before the window closes.
    const double exit = clearance / speed;
    const int probes = 2000;
    for (int i = 0; i <= probes; ++i) {
      const double t = exit + (o.window - exit) * i / probes;
      if (t <= exit) continue;
      const double travel = speed * t / 7.0;
      const double d = image_distance(
          {direction[0] * travel, direction[1] * travel, direction[2] * travel}, length);
      worst_return = std::min(worst_return, d);
      if (d < clearance) {
        throw ContractViolation(fmt::format(
            "window {} exceeds the wrap-around horizon: the N_hi = {} packet returns to within "
            "{} of the companion at t = {}",
            o.window, n_hi, d, t));
      }
    }
  }

  std::vector<double> log_n, log_q, qs, ns;
  for (int m : o.multiples) {
    const double n_hi = 8.0 * m / length;
    const double speed = 4.0 * kPi * 7.0 * m / length;
    InitialCondition packet{"modulated_gaussian",
                            {{"amplitude", 1.0},
                             {"width", wf},
                             {"k_x", direction[0] * m / length},
                             {"k_y", direction[1] * m / length},
                             {"k_z", direction[2] * m / length}},
                            0};
    ComplexField f0 = unit_l2(lp_project(make_initial(grid, packet), DyadicBand::at(n_hi)));
    f0 = scale(f0, std::polar(1.0, arg(rng)));
    const ComplexField f_hat = to_spectral(f0);

    const double transit = (wf + wg) / speed;
    const auto steps = static_cast<std::size_t>(
        std::ceil(o.window / transit * o.samples_per_transit));
    const double dt = o.window / static_cast<double>(steps);
    std::vector<double> density;
    for (std::size_t s = 0; s <= steps; ++s) {
      const double t = dt * static_cast<double>(s);
      const ComplexField f = to_spatial(free_propagate(f_hat, t));
      const ComplexField g = to_spatial(free_propagate(g_hat, t));
      density.push_back(grid.cell_volume() * pairwise_sum(f.size(), [&](std::size_t i) {
                          return std::norm(f[i]) * std::norm(g[i]);
                        }));
    }
    double q2 = 0.0;
    for (std::size_t s = 0; s < density.size(); ++s) {
      q2 += (s == 0 || s + 1 == density.size() ? 0.5 : 1.0) * dt * density[s];
    }
    ns.push_back(n_hi);
    qs.push_back(std::sqrt(q2));
    log_n.push_back(std::log(n_hi));
    log_q.push_back(std::log(std::sqrt(q2)));
  }

  CheckReport r;
  r.name = "bilinear_strichartz";
  const bool zero = std::all_of(qs.begin(), qs.end(), [](double q) { return q == 0.0; });
  r.fitted_constant = zero || qs.size() < 2 ? 0.0 : slope(log_n, log_q);
  if (!zero) r.max_fitted = -0.4;
  r.relative_residual = 0.0;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    r.metadata[fmt::format("Q_N{}", ns[i] * length)] = fmt_double(qs[i]);
  }
  r.metadata["window"] = fmt_double(o.window);
  r.metadata["seed"] = std::to_string(o.seed);
  r.metadata["closest_return"] = fmt_double(worst_return);
  r.metadata["n"] = std::to_string(o.n);
  return r;
}

// ---------------------------------------------------------------------------

BernsteinResult bernstein_sweep(const BernsteinOptions& o) {
  const Grid grid(o.n, o.box_length);
  const double length = o.box_length;
  const std::vector<double> top = resolvable_bands(grid);
  BernsteinResult result;
  std::vector<std::vector<double>> ratios(o.pairs.size());
  for (double band_units : o.bands) {
    const double band = band_units / length;
    if (!is_dyadic(band_units) || band < top.front() * (1 - 1e-12) ||
        band > top.back() * (1 + 1e-12)) {
      throw ContractViolation(fmt::format("band {} / L is not resolvable", band_units));
    }
    std::vector<std::vector<double>> samples(o.pairs.size());
    for (int s = 0; s < o.samples; ++s) {
      InitialCondition ic{"band_limited_random",
                          {{"band", band}, {"spikes", static_cast<double>(o.spikes)}, {"l2", 1.0}},
                          o.seed + 1000 * static_cast<std::uint64_t>(s)};
      const ComplexField f = make_initial(grid, ic);
      for (std::size_t p = 0; p < o.pairs.size(); ++p) {
        samples[p].push_back(lp_norm(f, o.pairs[p].second) / lp_norm(f, o.pairs[p].first));
      }
    }
    for (std::size_t p = 0; p < o.pairs.size(); ++p) {
      auto& v = samples[p];
      std::sort(v.begin(), v.end());
      const double median = v.size() % 2 ? v[v.size() / 2]
                                         : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
      const auto [pp, qq] = o.pairs[p];
      const double exponent = 3.0 / pp - (std::isinf(qq) ? 0.0 : 3.0 / qq);
      result.rows.push_back({band, pp, qq, median, median / std::pow(band, exponent)});
      ratios[p].push_back(median);
    }
  }
  for (std::size_t p = 0; p < o.pairs.size(); ++p) {
    const auto [pp, qq] = o.pairs[p];
    const double exponent = 3.0 / pp - (std::isinf(qq) ? 0.0 : 3.0 / qq);
    std::vector<double> x, y, c;
    for (std::size_t b = 0; b < o.bands.size(); ++b) {
      const double band = o.bands[b] / length;
      x.push_back(std::log(band));
      y.push_back(std::log(ratios[p][b]));
      c.push_back(ratios[p][b] / std::pow(band, exponent));
    }
    const double fitted = x.size() > 1 ? slope(x, y) : exponent;
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    CheckReport r;
    r.name = fmt::format("bernstein_p{}_q{}", pp, qq);
    r.relative_residual = std::abs(fitted - exponent);
    r.residual_norm = r.relative_residual;
    r.reference_norm = exponent;
    r.fitted_constant = *hi / *lo;
    r.metadata["fitted_exponent"] = fmt_double(fitted);
    r.metadata["expected_exponent"] = fmt_double(exponent);
    r.metadata["constant_min"] = fmt_double(*lo);
    r.metadata["constant_max"] = fmt_double(*hi);
    r.metadata["seed"] = std::to_string(o.seed);
    result.reports.push_back(std::move(r));
  }
  return result;
}

double highfreq_gradient_constant(const ComplexField& f, double n_cut) {
  const ComplexField hi = lp_project(f, DyadicBand::above_eq(n_cut), Representation::Spectral);
  const double num = sobolev_norm(hi, 0.0, true);
  const double den = sobolev_norm(hi, 1.0, true) / (2.0 * kPi);
  return den > 0.0 ? n_cut * num / den : 0.0;
}

}  // namespace cnls
