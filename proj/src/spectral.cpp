#include "cnls/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cnls/error.hpp"
#include "cnls/fft.hpp"
#include "cnls/summation.hpp"

namespace cnls {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// The sample at index i sits at (i - n/2) h, so relative to the plain DFT the
// continuum transform picks up exp(i pi a) = (-1)^index on every axis.
void apply_checkerboard(std::span<Complex> data, int n, double scale) {
  std::size_t flat = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double row = ((i + j) & 1) ? -scale : scale;
      for (int k = 0; k < n; ++k, ++flat) {
        data[flat] *= (k & 1) ? -row : row;
      }
    }
  }
}

// Calls f(flat, |k|^2) for every lattice index in storage order without the
// per-index division of Grid::unflatten.
template <typename F>
void for_each_norm2(const Grid& g, F&& f) {
  const int n = g.n();
  std::size_t flat = 0;
  for (int i = 0; i < n; ++i) {
    const long a = g.wavenumber(i);
    for (int j = 0; j < n; ++j) {
      const long b = g.wavenumber(j);
      const long ab = a * a + b * b;
      for (int k = 0; k < n; ++k, ++flat) {
        const long c = g.wavenumber(k);
        f(flat, static_cast<std::size_t>(ab + c * c));
      }
    }
  }
}

ComplexField spectral_copy(const ComplexField& field) {
  return field.is_spatial() ? to_spectral(field) : field;
}

ComplexField finish(ComplexField spec, Representation out) {
  return out == Representation::Spatial ? to_spatial(spec) : spec;
}

}  // namespace

ComplexField transform(const ComplexField& field, Direction direction) {
  const Grid& g = field.grid();
  const int n = g.n();
  ComplexField out = field;
  if (direction == Direction::Forward) {
    if (!field.is_spatial()) {
      throw ContractViolation("forward transform needs a spatial field");
    }
    fft::forward(out.data(), n);
    apply_checkerboard(out.data(), n, g.cell_volume());
    out.set_representation(Representation::Spectral);
  } else {
    if (field.is_spatial()) {
      throw ContractViolation("inverse transform needs a spectral field");
    }
    const double l = g.box_length();
    apply_checkerboard(out.data(), n, 1.0 / (l * l * l));
    fft::backward(out.data(), n);
    out.set_representation(Representation::Spatial);
  }
  return out;
}

ComplexField to_spectral(const ComplexField& field) {
  return transform(field, Direction::Forward);
}

ComplexField to_spatial(const ComplexField& field) {
  return transform(field, Direction::Inverse);
}

ComplexField multiplier(const ComplexField& field, const Symbol& m,
                        Representation out, ZeroModePolicy policy) {
  ComplexField spec = spectral_copy(field);
  const Grid& g = spec.grid();
  for (std::size_t idx = 0; idx < spec.size(); ++idx) {
    const Wavevector w{g.frequency(idx), g.frequency_norm2(idx),
                       g.is_nyquist(idx)};
    Complex value = m(w);
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
      if (idx == 0 && policy == ZeroModePolicy::SetZero) {
        value = 0.0;
      } else {
        throw ContractViolation(
            idx == 0 ? "multiplier is not finite at the zero mode"
                     : "multiplier is not finite at a nonzero lattice mode");
      }
    }
    spec[idx] *= value;
  }
  return finish(std::move(spec), out);
}

ComplexField radial_multiplier(const ComplexField& field,
                               const std::function<double(double)>& m,
                               Representation out) {
  ComplexField spec = spectral_copy(field);
  const Grid& g = spec.grid();
  const long half = g.n() / 2;
  std::vector<double> cache(static_cast<std::size_t>(3 * half * half + 1),
                            std::numeric_limits<double>::quiet_NaN());
  const double inv_l = 1.0 / g.box_length();
  for_each_norm2(g, [&](std::size_t idx, std::size_t key) {
    double& value = cache[key];
    if (std::isnan(value)) {
      value = m(std::sqrt(static_cast<double>(key)) * inv_l);
      if (!std::isfinite(value)) {
        throw ContractViolation("radial multiplier is not finite");
      }
    }
    spec[idx] *= value;
  });
  return finish(std::move(spec), out);
}

ComplexField lp_project(const ComplexField& field, const DyadicBand& band,
                        Representation out) {
  const CutoffProfile phi;
  return radial_multiplier(
      field, [&](double rho) { return band.symbol(rho, phi); }, out);
}

std::vector<double> resolvable_bands(const Grid& grid) {
  std::vector<double> bands;
  const double top = grid.nyquist_frequency();
  for (double nb = 2.0 / grid.box_length(); nb <= top * (1.0 + 1e-12); nb *= 2.0) {
    bands.push_back(nb);
  }
  return bands;
}

std::vector<double> lattice_bands(const Grid& grid) {
  std::vector<double> bands;
  for (int m = 1; m <= grid.n(); m *= 2) bands.push_back(m / grid.box_length());
  return bands;
}

ComplexField derivative(const ComplexField& field, int axis,
                        Representation out) {
  if (axis < 0 || axis > 2) throw ContractViolation("axis must be 0, 1 or 2");
  ComplexField spec = spectral_copy(field);
  const Grid& g = spec.grid();
  const int n = g.n();
  const double scale = kTwoPi / g.box_length();
  std::size_t flat = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k, ++flat) {
        const int index = axis == 0 ? i : (axis == 1 ? j : k);
        if (index == n / 2) {
          spec[flat] = 0.0;
        } else {
          spec[flat] *= Complex(0.0, scale * g.wavenumber(index));
        }
      }
    }
  }
  return finish(std::move(spec), out);
}

namespace {

// i 2 pi k / L per axis index, 0 on the Nyquist index.
std::vector<Complex> derivative_factors(const Grid& g) {
  std::vector<Complex> f(static_cast<std::size_t>(g.n()));
  const double scale = kTwoPi / g.box_length();
  for (int i = 0; i < g.n(); ++i) {
    f[static_cast<std::size_t>(i)] =
        i == g.n() / 2 ? Complex{} : Complex(0.0, scale * g.wavenumber(i));
  }
  return f;
}

ComplexBuffer half_spectrum(const RealField& f) {
  ComplexBuffer half(fft::half_size(f.grid.n()));
  fft::forward_real(f.data, half, f.grid.n());
  return half;
}

// Applies symbol(i, j, k) on the half spectrum, normalizes, and transforms back.
template <typename Symbol3>
RealField apply_half(const Grid& g, const ComplexBuffer& half, const Symbol3& symbol) {
  const int n = g.n();
  const int nk = n / 2 + 1;
  const double norm = 1.0 / (static_cast<double>(n) * n * n);
  ComplexBuffer work(half.size());
  std::size_t flat = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < nk; ++k, ++flat) work[flat] = half[flat] * (norm * symbol(i, j, k));
    }
  }
  RealField out(g);
  fft::backward_real(work, out.data, n);
  return out;
}

}  // namespace

RealField real_derivative(const RealField& f, int axis) {
  if (axis < 0 || axis > 2) throw ContractViolation("axis must be 0, 1 or 2");
  const auto d = derivative_factors(f.grid);
  const ComplexBuffer half = half_spectrum(f);
  return apply_half(f.grid, half, [&](int i, int j, int k) {
    return d[static_cast<std::size_t>(axis == 0 ? i : (axis == 1 ? j : k))];
  });
}

RealField real_divergence(const RealField& f0, const RealField& f1, const RealField& f2) {
  require_same_grid(f0.grid, f1.grid, "real_divergence");
  require_same_grid(f0.grid, f2.grid, "real_divergence");
  const Grid& g = f0.grid;
  const int n = g.n();
  const int nk = n / 2 + 1;
  const auto d = derivative_factors(g);
  const ComplexBuffer h0 = half_spectrum(f0), h1 = half_spectrum(f1), h2 = half_spectrum(f2);
  const double norm = 1.0 / (static_cast<double>(n) * n * n);
  ComplexBuffer work(h0.size());
  std::size_t flat = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < nk; ++k, ++flat) {
        work[flat] = norm * (d[static_cast<std::size_t>(i)] * h0[flat] +
                             d[static_cast<std::size_t>(j)] * h1[flat] +
                             d[static_cast<std::size_t>(k)] * h2[flat]);
      }
    }
  }
  RealField out(g);
  fft::backward_real(work, out.data, n);
  return out;
}

std::array<RealField, 6> real_hessian(const RealField& f) {
  const auto d = derivative_factors(f.grid);
  const ComplexBuffer half = half_spectrum(f);
  auto second = [&](int a, int b) {
    return apply_half(f.grid, half, [&](int i, int j, int k) {
      const int idx[3] = {i, j, k};
      return d[static_cast<std::size_t>(idx[a])] * d[static_cast<std::size_t>(idx[b])];
    });
  };
  return {second(0, 0), second(0, 1), second(0, 2), second(1, 1), second(1, 2), second(2, 2)};
}

std::array<ComplexField, 3> gradient(const ComplexField& field) {
  const ComplexField spec = spectral_copy(field);
  return {derivative(spec, 0), derivative(spec, 1), derivative(spec, 2)};
}

ComplexField laplacian(const ComplexField& field, Representation out) {
  const double c = -kTwoPi * kTwoPi;
  return radial_multiplier(
      field, [c](double rho) { return c * rho * rho; }, out);
}

ComplexField free_propagate(const ComplexField& field, double t) {
  ComplexField spec = spectral_copy(field);
  const Grid& g = spec.grid();
  const long half = g.n() / 2;
  const double l = g.box_length();
  const double c = -kTwoPi * kTwoPi * t / (l * l);
  std::vector<Complex> phase(static_cast<std::size_t>(3 * half * half + 1));
  for (std::size_t q = 0; q < phase.size(); ++q) {
    phase[q] = std::polar(1.0, c * static_cast<double>(q));
  }
  for_each_norm2(g, [&](std::size_t idx, std::size_t key) { spec[idx] *= phase[key]; });
  return field.is_spatial() ? to_spatial(spec) : spec;
}

// ---------------------------------------------------------------------------

double l2_norm(const ComplexField& field) {
  if (field.is_spatial()) {
    const auto d = field.data();
    const double s = pairwise_sum(d.size(), [&](std::size_t i) { return std::norm(d[i]); });
    return std::sqrt(field.grid().cell_volume() * s);
  }
  return sobolev_norm(field, 0.0, false);
}

double lp_norm(const ComplexField& field, double p) {
  if (!(p >= 1.0)) throw ContractViolation("L^p norm needs p >= 1");
  if (std::isinf(p)) return max_modulus(field);
  const ComplexField u = field.is_spatial() ? field : to_spatial(field);
  const auto d = u.data();
  double s = 0.0;
  if (p == 2.0) {
    s = pairwise_sum(d.size(), [&](std::size_t i) { return std::norm(d[i]); });
  } else {
    s = pairwise_sum(d.size(), [&](std::size_t i) { return std::pow(std::abs(d[i]), p); });
  }
  return std::pow(u.grid().cell_volume() * s, 1.0 / p);
}

double max_modulus(const ComplexField& field) {
  const ComplexField u = field.is_spatial() ? field : to_spatial(field);
  double m = 0.0;
  for (const Complex& z : u.data()) m = std::max(m, std::abs(z));
  return m;
}

double integrate(const RealField& f) {
  return f.grid.cell_volume() * pairwise_sum(std::span<const double>(f.data));
}

double l2_norm(const RealField& f) {
  const double s = pairwise_sum(f.size(), [&](std::size_t i) { return f[i] * f[i]; });
  return std::sqrt(f.grid.cell_volume() * s);
}

double sobolev_norm(const ComplexField& field, double s, bool homogeneous) {
  const ComplexField spec = spectral_copy(field);
  const Grid& g = spec.grid();
  const double l = g.box_length();
  if (homogeneous && s < 0.0) {
    // u_hat(0) / L^{3/2} is the L^2 size of the mean.
    const double mean = std::abs(spec[0]) / std::pow(l, 1.5);
    if (mean > 1e-12 * std::max(1.0, sobolev_norm(spec, 0.0, false))) {
      throw ContractViolation("zero-mode divergence");
    }
  }
  const long half = g.n() / 2;
  std::vector<double> weight(static_cast<std::size_t>(3 * half * half + 1));
  for (std::size_t q = 0; q < weight.size(); ++q) {
    const double rho2 = static_cast<double>(q) / (l * l);
    const double sym2 = homogeneous ? kTwoPi * kTwoPi * rho2
                                    : 1.0 + kTwoPi * kTwoPi * rho2;
    weight[q] = (s == 0.0) ? 1.0 : (q == 0 && homogeneous ? 0.0 : std::pow(sym2, s));
  }
  std::vector<double> terms(spec.size());
  for_each_norm2(g, [&](std::size_t i, std::size_t key) {
    terms[i] = weight[key] * std::norm(spec[i]);
  });
  const double total = pairwise_sum(std::span<const double>(terms));
  return std::sqrt(total / (l * l * l));
}

// ---------------------------------------------------------------------------

RealField modulus_squared(const ComplexField& f) {
  require_spatial(f, "modulus_squared");
  RealField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::norm(f[i]);
  return out;
}

ComplexField scale(const ComplexField& f, Complex c) {
  ComplexField out = f;
  for (Complex& z : out.data()) z *= c;
  return out;
}

ComplexField add(const ComplexField& a, const ComplexField& b, Complex cb) {
  require_same_grid(a.grid(), b.grid(), "add");
  if (a.representation() != b.representation()) {
    throw ContractViolation("add: representations differ");
  }
  ComplexField out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += cb * b[i];
  return out;
}

double l2_distance(const ComplexField& a, const ComplexField& b) {
  return l2_norm(add(a, b, -1.0));
}

}  // namespace cnls
