#include <cmath>
#include <numbers>
#include <random>

#include "cnls/error.hpp"
#include "cnls/evolution.hpp"
#include "cnls/spectral.hpp"

namespace cnls {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// A exp(-|x-c|^2/w^2) exp(i chirp |x-c|^2) exp(2 pi i k.x)
Complex gaussian_at(const Vec3& x, double amplitude, double width, const Vec3& center,
                    const Vec3& k, double chirp = 0.0) {
  double r2 = 0.0, phase = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double d = x[a] - center[a];
    r2 += d * d;
    phase += k[a] * x[a];
  }
  return amplitude * std::exp(-r2 / (width * width)) *
         std::polar(1.0, kTwoPi * phase + chirp * r2);
}

Vec3 vec_param(const InitialCondition& ic, const std::string& stem, double fallback) {
  return {ic.param(stem + "_x", fallback), ic.param(stem + "_y", fallback),
          ic.param(stem + "_z", fallback)};
}

ComplexField random_band(const Grid& grid, const InitialCondition& ic) {
  const double band = ic.param("band", 2.0 / grid.box_length());
  const int spikes = static_cast<int>(ic.param("spikes", 0.0));
  std::mt19937_64 rng(ic.seed);
  ComplexField f(grid, Representation::Spatial);
  if (spikes > 0) {
    const int n = grid.n();
    std::uniform_int_distribution<int> pos(n / 4, 3 * n / 4 - 1);
    std::uniform_real_distribution<double> mag(0.5, 1.0), arg(0.0, kTwoPi);
    for (int s = 0; s < spikes; ++s) {
      const int i = pos(rng), j = pos(rng), k = pos(rng);
      const double m = mag(rng);
      f[grid.index(i, j, k)] += std::polar(m, arg(rng));
    }
  } else {
    std::normal_distribution<double> normal;
    for (Complex& z : f.data()) {
      const double re = normal(rng);
      z = Complex(re, normal(rng));
    }
  }
  ComplexField out = lp_project(f, DyadicBand::at(band));
  const double target_l2 = ic.param("l2", 0.0);
  const double scale = target_l2 > 0.0 ? target_l2 / l2_norm(out)
                                       : ic.param("amplitude", 1.0) / max_modulus(out);
  for (Complex& z : out.data()) z *= scale;
  return out;
}

}  // namespace

double InitialCondition::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

ComplexField make_initial(const Grid& grid, const InitialCondition& ic) {
  const std::string& g = ic.generator;
  ComplexField u(grid, Representation::Spatial);
  const double amplitude = ic.param("amplitude", 1.0);
  if (g == "gaussian" || g == "modulated_gaussian") {
    const double width = ic.param("width", 1.0);
    const Vec3 center = vec_param(ic, "center", 0.0);
    const Vec3 k = g == "gaussian" ? Vec3{0, 0, 0} : vec_param(ic, "k", 0.0);
    const double chirp = ic.param("chirp", 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] = gaussian_at(grid.position(i), amplitude, width, center, k, chirp);
    }
  } else if (g == "two_bump") {
    const double width = ic.param("width", 1.0);
    const double half = 0.5 * ic.param("separation", 4.0);
    const double k = ic.param("k", 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const Vec3 x = grid.position(i);
      u[i] = gaussian_at(x, amplitude, width, {-half, 0, 0}, {k, 0, 0}) +
             gaussian_at(x, amplitude, width, {half, 0, 0}, {-k, 0, 0});
    }
  } else if (g == "band_limited_random") {
    return random_band(grid, ic);
  } else if (g == "plane_wave") {
    const Vec3 k = vec_param(ic, "k", 0.0);
    for (int a = 0; a < 3; ++a) {
      const double m = k[a] * grid.box_length();
      if (std::abs(m - std::round(m)) > 1e-9) {
        throw ContractViolation("plane_wave wavevector must be a lattice frequency");
      }
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] = gaussian_at(grid.position(i), amplitude, INFINITY, {0, 0, 0}, k);
    }
  } else if (g == "constant") {
    for (Complex& z : u.data()) z = amplitude;
  } else {
    throw ContractViolation("unknown initial-condition generator '" + g + "'");
  }
  return u;
}

}  // namespace cnls
