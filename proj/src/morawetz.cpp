#include "cnls/morawetz.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "cnls/conservation.hpp"
#include "cnls/error.hpp"
#include "cnls/format.hpp"
#include "cnls/slice.hpp"
#include "cnls/spectral.hpp"
#include "half_spectrum.hpp"

namespace cnls {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

double weighted_sum(const RealField& w, const RealField& f) {
  return f.grid.cell_volume() *
         pairwise_sum(f.size(), [&](std::size_t i) { return w[i] * f[i]; });
}

double sym_weight(int j, int k) { return j == k ? 1.0 : 2.0; }

RealBuffer scalar(double v) { return RealBuffer{v}; }

// |u|^2 at an arbitrary point y from the trigonometric interpolant of rho.
double interpolate(const RealField& rho, const Vec3& y) {
  const Grid& g = rho.grid;
  const ComplexBuffer half = detail::half_transform(rho);
  const double x0 = -0.5 * g.box_length();
  std::vector<double> terms(half.size());
  detail::for_each_half(g, [&](const detail::HalfMode& m) {
    if (m.nyquist) return;
    double phase = 0.0;
    for (int a = 0; a < 3; ++a) phase += m.xi[a] * (y[a] - x0);
    terms[m.flat] = m.weight * std::real(half[m.flat] * std::polar(1.0, kTwoPi * phase));
  });
  return pairwise_sum(std::span<const double>(terms)) / static_cast<double>(g.size());
}

// Weight centred at the origin, shared so its transform is computed once per
// (radius, profile, grid).
const MorawetzWeight& origin_weight(double radius, const CutoffProfile& profile) {
  static std::mutex mutex;
  static std::map<std::pair<double, int>, MorawetzWeight> weights;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(radius, static_cast<int>(profile.shape()));
  auto it = weights.find(key);
  if (it == weights.end()) {
    it = weights.emplace(key, MorawetzWeight({0.0, 0.0, 0.0}, radius, profile)).first;
  }
  return it->second;
}

void require_radius(const Grid& g, double radius) {
  if (!(radius > 0.0)) throw ContractViolation("interaction radius must be positive");
  require_kernel_fits(g, radius);
}

// ---------------------------------------------------------------------------
// Lattice kernels: entry m holds K at the minimum-image displacement m h.

template <typename F>
RealField sample_kernel(const Grid& g, const F& f) {
  RealField out(g);
  const int n = g.n();
  const double h = g.spacing();
  std::size_t flat = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k, ++flat) {
        out[flat] = f(Vec3{g.wavenumber(i) * h, g.wavenumber(j) * h, g.wavenumber(k) * h});
      }
    }
  }
  return out;
}

// conj of the continuum transform h^3 DFT(K) on the half spectrum.
ComplexBuffer conj_kernel_hat(const RealField& kernel) {
  ComplexBuffer half = detail::half_transform(kernel);
  const double cell = kernel.grid.cell_volume();
  for (auto& c : half) c = std::conj(c) * cell;
  return half;
}

double lattice_pair(const ComplexBuffer& f, const ComplexBuffer& g, const ComplexBuffer& k,
                    const Grid& grid) {
  return detail::pair_with_kernel(grid, f, g,
                                  [&](const detail::HalfMode& m) { return k[m.flat]; });
}

double radius_of(const Vec3& z) { return std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]); }

// ---------------------------------------------------------------------------
// Spectral interaction terms of one slice.

struct SliceSpectra {
  ComplexBuffer rho;
  std::array<ComplexBuffer, 3> t0j;
  std::array<ComplexBuffer, 6> products;  // Re(conj(u_j) u_k)
  std::array<ComplexBuffer, 3> momentum;  // {N,u}_p
  ComplexBuffer mass;                     // {N,u}_m
};

SliceSpectra slice_spectra(SliceQuantities& q) {
  SliceSpectra s;
  s.rho = detail::half_transform(q.rho());
  for (int j = 0; j < 3; ++j) s.t0j[j] = detail::half_transform(q.t0j()[j]);
  for (std::size_t c = 0; c < 6; ++c) s.products[c] = detail::half_transform(q.grad_products()[c]);
  if (q.mu() != Coupling::Free) {
    for (int j = 0; j < 3; ++j) s.momentum[j] = detail::half_transform(q.momentum_bracket()[j]);
    s.mass = detail::half_transform(q.mass_bracket());
  }
  return s;
}

struct SpectralTerms {
  double potential = 0.0;     // M^interact
  double bilaplacian = 0.0;   // int int rho(y) (-ΔΔa)(x-y) rho(x)
  double hessian = 0.0;       // 4 int int rho a_jk P_jk
  double bracket = 0.0;       // 2 int int rho a_j {N,u}_p^j
  double cross = 0.0;         // -int int T0k a_jk T0j
  double mass = 0.0;          // 2 int {N,u}_m M^y
  double rhs() const { return bilaplacian + hessian + bracket + cross + mass; }
};

SpectralTerms spectral_terms(const SliceSpectra& s, const Grid& g, const MorawetzWeight& w,
                             bool with_rhs) {
  const RealBuffer& ahat = w.half_coefficients(g);
  SpectralTerms t;
  auto pair = [&](const ComplexBuffer& f, const ComplexBuffer& h, auto&& symbol) {
    return detail::pair_with_kernel(g, f, h, [&](const detail::HalfMode& m) {
      return ahat[m.flat] * symbol(m.xi);
    });
  };
  // conj of the transforms of a_j, a_jk and -ΔΔa.
  auto grad = [](int j) {
    return [j](const Vec3& xi) { return Complex(0.0, -kTwoPi * xi[j]); };
  };
  auto hess = [](int j, int k) {
    return [j, k](const Vec3& xi) { return Complex(-kTwoPi * kTwoPi * xi[j] * xi[k]); };
  };
  for (int j = 0; j < 3; ++j) t.potential += pair(s.rho, s.t0j[j], grad(j));
  if (!with_rhs) return t;

  t.bilaplacian = pair(s.rho, s.rho, [](const Vec3& xi) {
    const double q = kTwoPi * kTwoPi * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
    return Complex(-q * q);
  });
  for (int j = 0; j < 3; ++j) {
    for (int k = j; k < 3; ++k) {
      const auto c = static_cast<std::size_t>(sym_index(j, k));
      t.hessian += 4.0 * sym_weight(j, k) * pair(s.rho, s.products[c], hess(j, k));
      t.cross -= sym_weight(j, k) * pair(s.t0j[k], s.t0j[j], hess(j, k));
    }
  }
  if (!s.mass.empty()) {
    for (int j = 0; j < 3; ++j) {
      t.bracket += 2.0 * pair(s.rho, s.momentum[j], grad(j));
      t.mass += 2.0 * pair(s.mass, s.t0j[j], grad(j));
    }
  }
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------

double virial_potential(const ComplexField& u, const MorawetzWeight& w, WeightMode mode) {
  require_spatial(u, "virial_potential");
  return weighted_sum(w.fields(u.grid(), mode).a, modulus_squared(u));
}

double morawetz_action(const ComplexField& u, const MorawetzWeight& w, WeightMode mode) {
  require_spatial(u, "morawetz_action");
  SliceQuantities q(u, Coupling::Free);
  const WeightFields& f = w.fields(u.grid(), mode);
  double m = 0.0;
  for (int j = 0; j < 3; ++j) m += weighted_sum(f.gradient[j], q.t0j()[j]);
  return m;
}

namespace {

VirialTerms virial_terms(SliceQuantities& q, const MorawetzWeight& w, WeightMode mode) {
  const WeightFields& f = w.fields(q.grid(), mode);
  VirialTerms t;
  t.bilaplacian = -weighted_sum(f.bilaplacian, q.rho());
  if (f.delta_strength != 0.0) t.bilaplacian -= f.delta_strength * interpolate(q.rho(), w.center());
  const auto& p = q.grad_products();
  for (int j = 0; j < 3; ++j) {
    for (int k = j; k < 3; ++k) {
      const auto c = static_cast<std::size_t>(sym_index(j, k));
      t.hessian += 4.0 * sym_weight(j, k) * weighted_sum(f.hessian[c], p[c]);
    }
  }
  if (q.mu() != Coupling::Free) {
    for (int j = 0; j < 3; ++j) {
      t.bracket += 2.0 * weighted_sum(f.gradient[j], q.momentum_bracket()[j]);
    }
  }
  return t;
}

CheckReport with_mu(CheckReport r, Coupling mu) {
  r.metadata["mu"] = std::to_string(static_cast<int>(mu));
  return r;
}

}  // namespace

VirialTerms virial_terms(const ComplexField& u, const MorawetzWeight& w, Coupling mu,
                         WeightMode mode) {
  require_spatial(u, "virial_terms");
  SliceQuantities q(u, mu);
  return virial_terms(q, w, mode);
}

IdentityMonitor vdot_monitor(const MorawetzWeight& w, Coupling, WeightMode mode) {
  return IdentityMonitor("vdot", [w, mode](double, SliceQuantities& q) {
    const WeightFields& f = w.fields(q.grid(), mode);
    double m = 0.0;
    for (int j = 0; j < 3; ++j) m += weighted_sum(f.gradient[j], q.t0j()[j]);
    if (q.mu() != Coupling::Free) m += 2.0 * weighted_sum(f.a, q.mass_bracket());
    IdentitySlice s;
    s.lhs.push_back(scalar(weighted_sum(f.a, q.rho())));
    s.rhs.push_back(scalar(m));
    return s;
  });
}

IdentityMonitor virial_monitor(const MorawetzWeight& w, Coupling, WeightMode mode) {
  IdentityMonitor monitor("virial_identity", [w, mode](double, SliceQuantities& q) {
    const WeightFields& f = w.fields(q.grid(), mode);
    double m = 0.0;
    for (int j = 0; j < 3; ++j) m += weighted_sum(f.gradient[j], q.t0j()[j]);
    IdentitySlice s;
    s.lhs.push_back(scalar(m));
    s.rhs.push_back(scalar(virial_terms(q, w, mode).total()));
    return s;
  });
  monitor.set_finalizer([w, mode](CheckReport& r) {
    r.metadata["weight"] = w.kind() == MorawetzWeight::Kind::Quadratic ? "quadratic" : "localized";
    r.metadata["weight_mode"] = mode == WeightMode::Spectral ? "spectral" : "lattice";
    r.metadata["radius"] = fmt_double(w.radius());
  });
  return monitor;
}

CheckReport check_Vdot(const FieldSeries& series, const MorawetzWeight& w, Coupling mu) {
  IdentityMonitor m = vdot_monitor(w, mu);
  return with_mu(run_monitor(m, series, mu), mu);
}

CheckReport check_virial_identity(const FieldSeries& series, const MorawetzWeight& w,
                                  Coupling mu) {
  IdentityMonitor m = virial_monitor(w, mu);
  return with_mu(run_monitor(m, series, mu), mu);
}

// ---------------------------------------------------------------------------

double interaction_potential(const ComplexField& u, double radius, WeightMode mode,
                             CutoffProfile profile) {
  require_spatial(u, "interaction_potential");
  const Grid& g = u.grid();
  require_radius(g, radius);
  SliceQuantities q(u, Coupling::Free);
  if (mode == WeightMode::Spectral) {
    SliceSpectra s;
    s.rho = detail::half_transform(q.rho());
    for (int j = 0; j < 3; ++j) s.t0j[j] = detail::half_transform(q.t0j()[j]);
    return spectral_terms(s, g, origin_weight(radius, profile), false).potential;
  }
  const MorawetzWeight w({0.0, 0.0, 0.0}, radius, profile);
  const ComplexBuffer rho = detail::half_transform(q.rho());
  double total = 0.0;
  for (int j = 0; j < 3; ++j) {
    const RealField kernel = sample_kernel(g, [&](const Vec3& z) { return w.gradient(z)[j]; });
    total += lattice_pair(rho, detail::half_transform(q.t0j()[j]), conj_kernel_hat(kernel), g);
  }
  return total;
}

InteractionTermBreakdown interaction_breakdown(const ComplexField& u, double radius, Coupling mu,
                                               CutoffProfile profile) {
  require_spatial(u, "interaction_breakdown");
  const Grid& g = u.grid();
  require_radius(g, radius);
  SliceQuantities q(u, mu);
  const SliceSpectra s = slice_spectra(q);
  const MorawetzWeight& w = origin_weight(radius, profile);
  const SpectralTerms t = spectral_terms(s, g, w, true);

  InteractionTermBreakdown b;
  const RealField& rho = q.rho();
  b.quartic_term = 8.0 * kPi * weighted_sum(rho, rho);
  b.momentum_bracket_term = t.bracket;
  b.cross_term = t.cross;
  b.mass_bracket_term = t.mass;
  b.total = t.rhs();
  b.min_chi_tilde = w.min_chi_tilde();

  const ComplexBuffer psi = conj_kernel_hat(sample_kernel(g, [&](const Vec3& z) {
    return w.psi(radius_of(z));
  }));
  b.quartic_kernel_term = t.bilaplacian + lattice_pair(s.rho, s.rho, psi, g);

  const ComplexBuffer psi_abs = conj_kernel_hat(sample_kernel(g, [&](const Vec3& z) {
    return std::abs(w.psi(radius_of(z)));
  }));
  b.error_band_term = lattice_pair(s.rho, s.rho, psi_abs, g);
  for (int j = 0; j < 3; ++j) {
    for (int k = j; k < 3; ++k) {
      const auto c = static_cast<std::size_t>(sym_index(j, k));
      const double m = sym_weight(j, k);
      const ComplexBuffer angular = conj_kernel_hat(sample_kernel(g, [&](const Vec3& z) {
        const double r = radius_of(z);
        if (r == 0.0) return 0.0;
        const double zz = z[j] * z[k] / (r * r);
        return ((j == k ? 1.0 : 0.0) - zz) * profile.tilde(r / radius) / r;
      }));
      b.angular_term += 4.0 * m * lattice_pair(s.rho, s.products[c], angular, g);
      const ComplexBuffer band = conj_kernel_hat(sample_kernel(g, [&](const Vec3& z) {
        const double r = radius_of(z);
        if (r == 0.0) return 0.0;
        return radius * radius * std::abs(w.psi(r)) * z[j] * z[k] / (r * r);
      }));
      b.error_band_term += m * lattice_pair(s.rho, s.products[c], band, g);
    }
  }
  b.remainder_term = b.total - (b.quartic_term + b.angular_term + b.momentum_bracket_term +
                                b.cross_term + b.mass_bracket_term);
  return b;
}

IdentityMonitor interaction_derivative_monitor(double radius, Coupling, CutoffProfile profile) {
  const MorawetzWeight w({0.0, 0.0, 0.0}, radius, profile);
  IdentityMonitor monitor("interaction_derivative", [w, radius](double, SliceQuantities& q) {
    require_radius(q.grid(), radius);
    const SpectralTerms t = spectral_terms(slice_spectra(q), q.grid(), w, true);
    IdentitySlice s;
    s.lhs.push_back(scalar(t.potential));
    s.rhs.push_back(scalar(t.rhs()));
    return s;
  });
  monitor.set_finalizer([radius](CheckReport& r) { r.metadata["radius"] = fmt_double(radius); });
  return monitor;
}

CheckReport check_interaction_derivative(const FieldSeries& series, double radius, Coupling mu) {
  IdentityMonitor m = interaction_derivative_monitor(radius, mu);
  return with_mu(run_monitor(m, series, mu), mu);
}

// ---------------------------------------------------------------------------

namespace {

double quartic_integral(const ComplexField& u) {
  const double cell = u.grid().cell_volume();
  return cell * pairwise_sum(u.size(), [&](std::size_t i) {
           const double z = std::norm(u[i]);
           return z * z;
         });
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  return s;
}

}  // namespace

namespace {

DyadicBand quartic_band(const Grid& g, double n_star) {
  const std::vector<double> bands = resolvable_bands(g);
  if (!is_dyadic(n_star) || n_star < 0.5 * bands.front() || n_star > 2.0 * bands.back()) {
    throw ContractViolation(fmt::format("N* = {} is outside the resolvable bands [{}, {}]",
                                        n_star, 0.5 * bands.front(), 2.0 * bands.back()));
  }
  return DyadicBand::above_eq(n_star);
}

void require_not_focusing(Coupling mu) {
  if (mu == Coupling::Focusing) {
    throw ContractViolation("the interaction Morawetz estimate needs defocusing data");
  }
}

}  // namespace

InteractionInequalityMonitor::InteractionInequalityMonitor(Coupling mu) : mu_(mu) {
  require_not_focusing(mu);
}

void InteractionInequalityMonitor::observe(double t, const ComplexField& u) {
  if (t_.empty()) mass0_ = total_mass(u);
  t_.push_back(t);
  quartic_.push_back(quartic_integral(u));
  sup_half_ = std::max(sup_half_, sobolev_norm(u, 0.5, true));
}

double InteractionInequalityMonitor::lhs() const { return trapezoid(t_, quartic_); }
double InteractionInequalityMonitor::rhs() const { return mass0_ * sup_half_ * sup_half_; }
double InteractionInequalityMonitor::ratio() const { return rhs() > 0.0 ? lhs() / rhs() : 0.0; }

CheckReport InteractionInequalityMonitor::finish() const {
  if (t_.empty()) throw ContractViolation("interaction_inequality_probe needs records");
  CheckReport r = CheckReport::from_norms("interaction_inequality", lhs(), rhs());
  r.fitted_constant = ratio();
  r.relative_residual = ratio();
  r.metadata["lhs_quartic"] = fmt_double(lhs());
  r.metadata["rhs_core"] = fmt_double(rhs());
  r.metadata["mu"] = std::to_string(static_cast<int>(mu_));
  return r;
}

CheckReport interaction_inequality_probe(const FieldSeries& series, Coupling mu) {
  InteractionInequalityMonitor m(mu);
  for (std::size_t i = 0; i < series.size(); ++i) m.observe(series.time(i), series[i]);
  return m.finish();
}

FrequencyQuarticMonitor::FrequencyQuarticMonitor(const Grid& grid, double n_star)
    : band_(quartic_band(grid, n_star)) {}

void FrequencyQuarticMonitor::observe(double t, const ComplexField& u) {
  t_.push_back(t);
  quartic_.push_back(quartic_integral(lp_project(u, band_)));
}

double FrequencyQuarticMonitor::value() const {
  return t_.size() < 2 ? 0.0 : trapezoid(t_, quartic_);
}

double frequency_localized_quartic(const FieldSeries& series, double n_star) {
  if (series.empty()) throw ContractViolation("frequency_localized_quartic needs records");
  FrequencyQuarticMonitor m(series.grid(), n_star);
  for (std::size_t i = 0; i < series.size(); ++i) m.observe(series.time(i), series[i]);
  return m.value();
}

// ---------------------------------------------------------------------------

PseudoconformalMonitor::PseudoconformalMonitor(Coupling mu, double support_tolerance)
    : mu_(mu), tolerance_(support_tolerance) {}

void PseudoconformalMonitor::observe(double t, const ComplexField& field) {
  const ComplexField u = field.is_spatial() ? field : to_spatial(field);
  const Grid& g = u.grid();
  const double quarter = 0.25 * g.box_length();
  const double cell = g.cell_volume();

  // Support inside the central half-box.
  const double mass = total_mass(u);
  const double outside = cell * pairwise_sum(u.size(), [&](std::size_t i) {
                           const Vec3 x = g.position(i);
                           const bool in = std::abs(x[0]) < quarter && std::abs(x[1]) < quarter &&
                                           std::abs(x[2]) < quarter;
                           return in ? 0.0 : std::norm(u[i]);
                         });
  const double fraction = mass > 0.0 ? outside / mass : 0.0;
  worst_outside_ = std::max(worst_outside_, fraction);
  if (fraction > tolerance_) {
    throw ContractViolation(fmt::format(
        "pseudoconformal weight invalid: mass fraction {} outside the central half-box at t = {}",
        fraction, t));
  }

  if (times_.empty()) t0_ = t;
  const double s = t - t0_;
  if (times_.size() >= 2) {
    const double step = times_[1] - times_[0];
    if (std::abs((s - times_.back()) - step) > 1e-9 * std::abs(step)) {
      throw ContractViolation("pseudoconformal check needs uniformly spaced records");
    }
  }
  const double sixth = cell * pairwise_sum(u.size(), [&](std::size_t i) {
                         const double z = std::norm(u[i]);
                         return z * z * z;
                       });
  times_.push_back(s);
  sixth_.push_back(sixth);

  const auto grad = gradient(u);
  const double weighted = cell * pairwise_sum(u.size(), [&](std::size_t i) {
                            const Vec3 x = g.position(i);
                            double acc = 0.0;
                            for (int j = 0; j < 3; ++j) {
                              acc += std::norm(x[j] * u[i] + Complex(0.0, 2.0 * s) * grad[j][i]);
                            }
                            return acc;
                          });
  if (times_.size() == 1) initial_ = weighted;
  if ((times_.size() - 1) % 2 != 0) return;

  const double nl = mu_ == Coupling::Free ? 0.0 : coupling_sign(mu_);
  double integral = 0.0;
  for (std::size_t i = 0; i + 2 < times_.size(); i += 2) {
    const double h = times_[i + 1] - times_[i];
    integral += h / 3.0 *
                (times_[i] * sixth_[i] + 4.0 * times_[i + 1] * sixth_[i + 1] +
                 times_[i + 2] * sixth_[i + 2]);
  }
  const double lhs = weighted + nl * (4.0 / 3.0) * s * s * sixth;
  const double rhs = initial_ - nl * (16.0 / 3.0) * integral;
  residual2_ += (lhs - rhs) * (lhs - rhs);
  reference2_ += lhs * lhs;
  ++evaluated_;
}

CheckReport PseudoconformalMonitor::finish() const {
  if (evaluated_ < 2) throw ContractViolation("pseudoconformal check needs at least 3 records");
  CheckReport r =
      CheckReport::from_norms("pseudoconformal", std::sqrt(residual2_), std::sqrt(reference2_));
  r.metadata["initial_weighted_norm"] = fmt_double(initial_);
  r.metadata["evaluated_records"] = std::to_string(evaluated_);
  r.metadata["max_outside_fraction"] = fmt_double(worst_outside_);
  r.metadata["mu"] = std::to_string(static_cast<int>(mu_));
  return r;
}

CheckReport pseudoconformal_check(const FieldSeries& series, Coupling mu) {
  if (mu == Coupling::Focusing) {
    throw ContractViolation("the pseudoconformal law is checked for defocusing or free flow");
  }
  PseudoconformalMonitor m(mu);
  for (std::size_t i = 0; i < series.size(); ++i) m.observe(series.time(i), series[i]);
  return m.finish();
}

// ---------------------------------------------------------------------------

double ScalingProbe::spread() const {
  if (values.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo <= 0.0) return *hi <= 0.0 ? 1.0 : HUGE_VAL;
  return *hi / *lo;
}

ScalingProbe interaction_ratio_scaling(const SimulationConfig& config,
                                       const std::vector<double>& lambdas) {
  require_not_focusing(config.mu);
  ScalingProbe p;
  for (double lambda : lambdas) {
    const SimulationConfig c = rescale_config(config, lambda);
    InteractionInequalityMonitor acc(c.mu);
    EvolveOptions opt;
    opt.keep_series = false;
    opt.on_record = [&](std::size_t, double t, const ComplexField& u) { acc.observe(t, u); };
    evolve(c, opt);
    p.lambdas.push_back(lambda);
    p.values.push_back(acc.ratio());
  }
  return p;
}

ScalingProbe quartic_scaling(const SimulationConfig& config, double n_star,
                             const std::vector<double>& lambdas) {
  ScalingProbe p;
  for (double lambda : lambdas) {
    const SimulationConfig c = rescale_config(config, lambda);
    const double n = n_star / lambda;
    FrequencyQuarticMonitor acc(c.grid(), n);
    EvolveOptions opt;
    opt.keep_series = false;
    opt.on_record = [&](std::size_t, double t, const ComplexField& u) { acc.observe(t, u); };
    evolve(c, opt);
    p.lambdas.push_back(lambda);
    p.values.push_back(acc.value() * n * n * n);
  }
  return p;
}

}  // namespace cnls
