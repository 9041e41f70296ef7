#pragma once

#include <array>
#include <memory>

#include "cnls/cutoff.hpp"
#include "cnls/field.hpp"

namespace cnls {

/// How a weight is put on the lattice.
///
/// Lattice samples the closed forms at the grid points (minimum image, the
/// singular samples at x = y set to 0, the delta part of the bi-Laplacian kept
/// out of the sampled field). Spectral builds the trigonometric polynomial
/// whose coefficients are the continuum transform of a, so every derivative is
/// the exact spectral derivative of the same band-limited weight and the
/// lattice identities hold up to time-stepping and aliasing error.
enum class WeightMode { Spectral, Lattice };

/// Weight and derived fields on one grid.
struct WeightFields {
  RealField a;
  VectorField gradient;               // a_j
  std::array<RealField, 6> hessian;   // a_jk packed by sym_index
  RealField bilaplacian;              // Delta Delta a without the delta part in Lattice mode
  /// ΔΔa = bilaplacian + delta_strength * delta_y; -8 pi in Lattice mode, 0 otherwise.
  double delta_strength = 0.0;
};

/// a(x) = |x - y| chi(|x - y| / R), or the unlocalized |x - y|^2.
class MorawetzWeight {
 public:
  enum class Kind { Localized, Quadratic };

  /// Throws ContractViolation for R <= 0.
  MorawetzWeight(Vec3 center, double radius,
                 CutoffProfile profile = CutoffProfile(CutoffProfile::Shape::Smoothstep));
  /// a = |x - y|^2 with the minimum-image displacement. Only meaningful for
  /// data that stay away from the box boundary.
  static MorawetzWeight quadratic(Vec3 center);

  Kind kind() const { return kind_; }
  const Vec3& center() const { return center_; }
  double radius() const { return radius_; }
  const CutoffProfile& profile() const { return profile_; }

  /// Closed forms at displacement z = x - y. The gradient and Hessian are 0
  /// at z = 0.
  double value(const Vec3& z) const;
  Vec3 gradient(const Vec3& z) const;
  std::array<double, 6> hessian(const Vec3& z) const;
  double laplacian(double r) const;
  /// psi(r) = r chi''''/R^4 + 8 chi'''/R^3 + 12 chi''/(R^2 r), the smooth part
  /// of ΔΔa = -8 pi delta + psi. Zero for the quadratic weight.
  double psi(double r) const;
  /// min over s of chi(s) + s chi'(s), sampled finely on [0, 2].
  double min_chi_tilde() const;

  /// Continuum transform of the weight centred at the origin at |xi| = rho,
  /// 4 pi int_0^{2R} r^3 chi(r/R) sinc(2 pi rho r) dr by composite
  /// Gauss-Legendre quadrature. Localized weights only.
  double transform(double rho) const;

  /// transform() at every entry of the raw half spectrum of `grid` (see
  /// fft::forward_real), 0 on the Nyquist planes. Cached per grid.
  const RealBuffer& half_coefficients(const Grid& grid) const;

  /// Minimum-image displacement x - y of a grid point.
  Vec3 displacement(const Grid& grid, std::size_t flat) const;

  /// Fields on `grid`, built once per grid and mode and shared between copies.
  /// The quadratic weight is always sampled. Throws "kernel wrap-around" when
  /// the support 2R does not fit in half the box and ContractViolation when
  /// R is below the grid spacing.
  const WeightFields& fields(const Grid& grid, WeightMode mode = WeightMode::Spectral) const;

 private:
  struct Cache;

  Kind kind_;
  Vec3 center_;
  double radius_;
  CutoffProfile profile_;
  std::shared_ptr<Cache> cache_;
};

/// Throws ContractViolation("kernel wrap-around") unless 2R <= L/2.
void require_kernel_fits(const Grid& grid, double radius);

}  // namespace cnls
