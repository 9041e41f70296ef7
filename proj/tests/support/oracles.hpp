#pragma once

// Reference computations that share no code path with the library beyond the
// field container and the cutoff profile.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "cnls/cutoff.hpp"
#include "cnls/field.hpp"
#include "cnls/grid.hpp"

namespace oracle {

using cnls::Complex;
using cnls::ComplexField;
using cnls::Grid;
using cnls::Vec3;
inline constexpr double kPi = std::numbers::pi;

/// d_j u by a direct DFT along axis j, multiplier 2 pi i m / L, Nyquist mode dropped.
inline ComplexField dft_derivative(const ComplexField& u, int axis) {
  const Grid& g = u.grid();
  const int n = g.n();
  ComplexField out(g, cnls::Representation::Spatial);
  std::vector<Complex> line(n), coef(n);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      auto at = [&](int s) -> std::size_t {
        if (axis == 0) return g.index(s, p, q);
        if (axis == 1) return g.index(p, s, q);
        return g.index(p, q, s);
      };
      for (int s = 0; s < n; ++s) line[s] = u[at(s)];
      for (int m = 0; m < n; ++m) {
        Complex c = 0.0;
        for (int s = 0; s < n; ++s) c += line[s] * std::polar(1.0, -2.0 * kPi * m * s / n);
        coef[m] = c / static_cast<double>(n);
      }
      for (int s = 0; s < n; ++s) {
        Complex v = 0.0;
        for (int m = 0; m < n; ++m) {
          const int k = m < n / 2 ? m : m - n;
          if (m == n / 2) continue;
          v += coef[m] * Complex(0.0, 2.0 * kPi * k / g.box_length()) *
               std::polar(1.0, 2.0 * kPi * m * s / n);
        }
        out[at(s)] = v;
      }
    }
  }
  return out;
}

/// Minimum-image component in [-L/2, L/2).
inline double wrap(double z, double L) { return z - L * std::floor(z / L + 0.5); }

/// h^6 sum_y sum_x |u(y)|^2 K_j(x - y) T_0j(x), K_j(z) = chi~(|z|/R) z_j/|z|,
/// T_0j = 2 Im(conj(u) d_j u).
inline double brute_force_interaction(const ComplexField& u, double radius) {
  const Grid& g = u.grid();
  const cnls::CutoffProfile chi(cnls::CutoffProfile::Shape::Smoothstep);
  std::vector<std::array<double, 3>> t0(u.size());
  for (int j = 0; j < 3; ++j) {
    const ComplexField d = dft_derivative(u, j);
    for (std::size_t i = 0; i < u.size(); ++i) t0[i][j] = 2.0 * std::imag(std::conj(u[i]) * d[i]);
  }
  const double L = g.box_length();
  double total = 0.0;
  for (std::size_t y = 0; y < u.size(); ++y) {
    const double rho = std::norm(u[y]);
    const Vec3 py = g.position(y);
    for (std::size_t x = 0; x < u.size(); ++x) {
      if (x == y) continue;
      const Vec3 px = g.position(x);
      const Vec3 z{wrap(px[0] - py[0], L), wrap(px[1] - py[1], L), wrap(px[2] - py[2], L)};
      const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
      const double k = chi.tilde(r / radius) / r;
      total += rho * k * (z[0] * t0[x][0] + z[1] * t0[x][1] + z[2] * t0[x][2]);
    }
  }
  const double h3 = std::pow(g.spacing(), 3);
  return h3 * h3 * total;
}

/// Complex normal samples, seeded.
inline ComplexField random_field(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ComplexField u(g, cnls::Representation::Spatial);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = Complex(normal(rng), normal(rng));
  return u;
}

/// A exp(-|x - c|^2 / w^2) exp(2 pi i k.x), sampled directly.
inline ComplexField gaussian(const Grid& g, double amplitude, double width, Vec3 center = {},
                             Vec3 k = {}) {
  ComplexField u(g, cnls::Representation::Spatial);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Vec3 x = g.position(i);
    double r2 = 0.0, phase = 0.0;
    for (int a = 0; a < 3; ++a) {
      r2 += (x[a] - center[a]) * (x[a] - center[a]);
      phase += k[a] * x[a];
    }
    u[i] = amplitude * std::exp(-r2 / (width * width)) * std::polar(1.0, 2.0 * kPi * phase);
  }
  return u;
}

// Closed forms on R^3 for the Gaussian above.
inline double gaussian_mass(double A, double w) {
  return A * A * std::pow(kPi * w * w / 2.0, 1.5);
}
inline double gaussian_gradient_sq(double A, double w, Vec3 k = {}) {
  const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
  return 3.0 * A * A / (w * w) * std::pow(kPi * w * w / 2.0, 1.5) +
         4.0 * kPi * kPi * k2 * gaussian_mass(A, w);
}
inline double gaussian_sixth(double A, double w) {
  return std::pow(A, 6) * std::pow(kPi * w * w / 6.0, 1.5);
}

}  // namespace oracle
