#pragma once

#include <string>

namespace cnls {

/// Radial cutoff equal to 1 on [0, 1], decreasing on [1, 2], 0 beyond 2.
///
/// Two shapes are provided. CosineSquared, cos^2(pi (r - 1) / 2) on the
/// transition, is C^1 and is what the Littlewood-Paley projectors use.
/// Smoothstep is the degree-9 polynomial with four vanishing derivatives at
/// both ends (C^4); Morawetz weights need it because their bi-Laplacian
/// involves the fourth derivative of the profile.
class CutoffProfile {
 public:
  enum class Shape { CosineSquared, Smoothstep };

  constexpr CutoffProfile() = default;
  constexpr explicit CutoffProfile(Shape shape) : shape_(shape) {}

  Shape shape() const { return shape_; }
  std::string name() const;

  double operator()(double r) const { return derivative(r, 0); }
  /// d^order/dr^order of the profile, order in [0, 4]. Inside the transition
  /// interval the value is exact; outside it is 0 except the value itself.
  double derivative(double r, int order) const;

  /// chi_tilde(r) = chi(r) + r chi'(r), the radial factor of grad(|x| chi(|x|)).
  double tilde(double r) const;
  /// d/dr of tilde(r).
  double tilde_derivative(double r) const;

 private:
  Shape shape_ = Shape::CosineSquared;
};

/// Dyadic Littlewood-Paley band. Frequencies are in cycles per unit length.
struct DyadicBand {
  enum class Kind { At, Below, Above, BelowEq, AboveEq, Range };

  Kind kind = Kind::At;
  double n = 1.0;      // N
  double m = 1.0;      // lower end M for Range, ignored otherwise

  static DyadicBand at(double n);
  static DyadicBand below(double n);      // P_{<N}  = P_{<=N/2}
  static DyadicBand above(double n);      // P_{>N}  = 1 - P_{<=N}
  static DyadicBand below_eq(double n);   // P_{<=N}
  static DyadicBand above_eq(double n);   // P_{>=N} = 1 - P_{<N}
  static DyadicBand range(double m, double n);  // P_{M<.<=N}

  /// Fourier symbol of the projector at |xi| = rho.
  double symbol(double rho, const CutoffProfile& phi = CutoffProfile{}) const;
};

/// True if x is an exact integer power of two (any sign of the exponent).
bool is_dyadic(double x);

}  // namespace cnls
