#include "cnls/morawetz_weight.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>
#include <cmath>
#include <deque>
#include <mutex>
#include <numbers>
#include <unordered_map>
#include <vector>

#include "cnls/error.hpp"
#include "cnls/spectral.hpp"
#include "half_spectrum.hpp"

namespace cnls {
namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// int_a^b f with one 20-point Gauss-Legendre panel per half oscillation.
template <typename F>
double oscillatory_integral(const F& f, double a, double b, double omega) {
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) * omega / kPi)));
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    sum += boost::math::quadrature::gauss<double, 20>::integrate(f, a + p * width,
                                                                  a + (p + 1) * width);
  }
  return sum;
}

std::array<RealField, 6> six(const Grid& g) {
  return {RealField(g), RealField(g), RealField(g), RealField(g), RealField(g), RealField(g)};
}

}  // namespace

struct MorawetzWeight::Cache {
  struct Entry {
    int n;
    double length;
    WeightMode mode;
    std::unique_ptr<WeightFields> fields;
  };
  struct Coefficients {
    int n;
    double length;
    RealBuffer values;
  };
  std::mutex mutex;
  std::vector<Entry> entries;
  std::mutex coefficient_mutex;
  std::deque<Coefficients> coefficients;  // deque: references stay valid
};

void require_kernel_fits(const Grid& grid, double radius) {
  if (!(2.0 * radius <= 0.5 * grid.box_length() * (1.0 + 1e-12))) {
    throw ContractViolation(
        fmt::format("kernel wrap-around: support 2R = {} exceeds L/2 = {}", 2.0 * radius,
                    0.5 * grid.box_length()));
  }
}

MorawetzWeight::MorawetzWeight(Vec3 center, double radius, CutoffProfile profile)
    : kind_(Kind::Localized),
      center_(center),
      radius_(radius),
      profile_(profile),
      cache_(std::make_shared<Cache>()) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ContractViolation("Morawetz weight radius must be positive");
  }
}

MorawetzWeight MorawetzWeight::quadratic(Vec3 center) {
  MorawetzWeight w(center, 1.0);
  w.kind_ = Kind::Quadratic;
  return w;
}

double MorawetzWeight::value(const Vec3& z) const {
  const double r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
  if (kind_ == Kind::Quadratic) return r2;
  const double r = std::sqrt(r2);
  return r * profile_(r / radius_);
}

Vec3 MorawetzWeight::gradient(const Vec3& z) const {
  if (kind_ == Kind::Quadratic) return {2.0 * z[0], 2.0 * z[1], 2.0 * z[2]};
  const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  const double f = profile_.tilde(r / radius_) / r;
  return {f * z[0], f * z[1], f * z[2]};
}

std::array<double, 6> MorawetzWeight::hessian(const Vec3& z) const {
  std::array<double, 6> h{};
  if (kind_ == Kind::Quadratic) {
    h[static_cast<std::size_t>(sym_index(0, 0))] = 2.0;
    h[static_cast<std::size_t>(sym_index(1, 1))] = 2.0;
    h[static_cast<std::size_t>(sym_index(2, 2))] = 2.0;
    return h;
  }
  const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
  if (r == 0.0) return h;
  const double s = r / radius_;
  const double tangential = profile_.tilde(s) / r;
  const double radial = profile_.tilde_derivative(s) / radius_;
  for (int j = 0; j < 3; ++j) {
    for (int k = j; k < 3; ++k) {
      const double zz = z[j] * z[k] / (r * r);
      h[static_cast<std::size_t>(sym_index(j, k))] =
          ((j == k ? 1.0 : 0.0) - zz) * tangential + zz * radial;
    }
  }
  return h;
}

double MorawetzWeight::laplacian(double r) const {
  if (kind_ == Kind::Quadratic) return 6.0;
  const double s = r / radius_;
  return 2.0 * profile_(s) / r + 4.0 * profile_.derivative(s, 1) / radius_ +
         r * profile_.derivative(s, 2) / (radius_ * radius_);
}

double MorawetzWeight::psi(double r) const {
  if (kind_ == Kind::Quadratic || r <= radius_) return 0.0;
  const double s = r / radius_;
  const double r2 = radius_ * radius_;
  return r * profile_.derivative(s, 4) / (r2 * r2) +
         8.0 * profile_.derivative(s, 3) / (r2 * radius_) +
         12.0 * profile_.derivative(s, 2) / (r2 * r);
}

double MorawetzWeight::min_chi_tilde() const {
  if (kind_ == Kind::Quadratic) return 1.0;
  double lo = 1.0;
  constexpr int kSamples = 4000;
  for (int i = 0; i <= kSamples; ++i) lo = std::min(lo, profile_.tilde(2.0 * i / kSamples));
  return lo;
}

double MorawetzWeight::transform(double rho) const {
  if (kind_ == Kind::Quadratic) {
    throw ContractViolation("the quadratic weight has no Fourier transform");
  }
  const double omega = 2.0 * kPi * rho;
  auto integrand = [&](double r) {
    return r * r * r * profile_(r / radius_) * sinc(omega * r);
  };
  return 4.0 * kPi * (oscillatory_integral(integrand, 0.0, radius_, omega) +
                      oscillatory_integral(integrand, radius_, 2.0 * radius_, omega));
}

const RealBuffer& MorawetzWeight::half_coefficients(const Grid& grid) const {
  if (kind_ == Kind::Quadratic) {
    throw ContractViolation("the quadratic weight has no Fourier transform");
  }
  std::lock_guard<std::mutex> lock(cache_->coefficient_mutex);
  for (const auto& c : cache_->coefficients) {
    if (c.n == grid.n() && c.length == grid.box_length()) return c.values;
  }
  const double length = grid.box_length();
  std::unordered_map<long, double> by_norm;
  RealBuffer values(fft::half_size(grid.n()), 0.0);
  detail::for_each_half(grid, [&](const detail::HalfMode& m) {
    if (m.nyquist) return;
    auto it = by_norm.find(m.norm2);
    if (it == by_norm.end()) {
      it = by_norm.emplace(m.norm2, transform(std::sqrt(static_cast<double>(m.norm2)) / length))
               .first;
    }
    values[m.flat] = it->second;
  });
  cache_->coefficients.push_back({grid.n(), length, std::move(values)});
  return cache_->coefficients.back().values;
}

Vec3 MorawetzWeight::displacement(const Grid& grid, std::size_t flat) const {
  const Vec3 x = grid.position(flat);
  const double length = grid.box_length();
  Vec3 z{};
  for (int a = 0; a < 3; ++a) {
    double d = x[a] - center_[a];
    d -= length * std::round(d / length);
    z[a] = d;
  }
  return z;
}

const WeightFields& MorawetzWeight::fields(const Grid& grid, WeightMode mode) const {
  if (kind_ == Kind::Quadratic) mode = WeightMode::Lattice;
  std::lock_guard<std::mutex> lock(cache_->mutex);
  for (const auto& e : cache_->entries) {
    if (e.n == grid.n() && e.length == grid.box_length() && e.mode == mode) return *e.fields;
  }
  if (kind_ == Kind::Localized) {
    require_kernel_fits(grid, radius_);
    if (radius_ < grid.spacing()) {
      throw ContractViolation(fmt::format("weight radius {} is below the grid spacing {}",
                                          radius_, grid.spacing()));
    }
  }

  auto out = std::make_unique<WeightFields>(WeightFields{
      RealField(grid), {RealField(grid), RealField(grid), RealField(grid)}, six(grid),
      RealField(grid), 0.0});

  if (mode == WeightMode::Lattice) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec3 z = displacement(grid, i);
      const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
      out->a[i] = value(z);
      const Vec3 g = gradient(z);
      for (int j = 0; j < 3; ++j) out->gradient[j][i] = g[j];
      const auto h = hessian(z);
      for (std::size_t c = 0; c < 6; ++c) out->hessian[c][i] = h[c];
      out->bilaplacian[i] = psi(r);
    }
    out->delta_strength = kind_ == Kind::Localized ? -8.0 * kPi : 0.0;
  } else {
    // Coefficients a_hat(xi) exp(-2 pi i xi.y), shifted to the index origin
    // x0 = (-L/2, -L/2, -L/2) and inverted with the raw c2r transform.
    const int n = grid.n();
    const double length = grid.box_length();
    const RealBuffer& coefficients = half_coefficients(grid);
    ComplexBuffer base(fft::half_size(n));
    std::vector<Vec3> xi(base.size());
    detail::for_each_half(grid, [&](const detail::HalfMode& m) {
      xi[m.flat] = m.xi;
      double phase = 0.0;
      for (int a = 0; a < 3; ++a) phase += m.xi[a] * (-0.5 * length - center_[a]);
      base[m.flat] = coefficients[m.flat] / (length * length * length) *
                     std::polar(1.0, 2.0 * kPi * phase);
    });
    auto build = [&](RealField& target, auto&& symbol) {
      ComplexBuffer work(base.size());
      for (std::size_t f = 0; f < base.size(); ++f) work[f] = base[f] * symbol(xi[f]);
      fft::backward_real(work, target.data, n);
    };
    const double two_pi = 2.0 * kPi;
    build(out->a, [](const Vec3&) { return Complex(1.0); });
    for (int j = 0; j < 3; ++j) {
      build(out->gradient[j], [&](const Vec3& x) { return Complex(0.0, two_pi * x[j]); });
    }
    for (int j = 0; j < 3; ++j) {
      for (int k = j; k < 3; ++k) {
        build(out->hessian[static_cast<std::size_t>(sym_index(j, k))],
              [&](const Vec3& x) { return Complex(-two_pi * two_pi * x[j] * x[k]); });
      }
    }
    build(out->bilaplacian, [&](const Vec3& x) {
      const double q = two_pi * two_pi * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
      return Complex(q * q);
    });
  }
  cache_->entries.push_back({grid.n(), grid.box_length(), mode, std::move(out)});
  return *cache_->entries.back().fields;
}

}  // namespace cnls
