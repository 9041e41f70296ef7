#include "cnls/cutoff.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "cnls/error.hpp"

namespace cnls {
namespace {

// Degree-9 smoothstep S(s) = s^5 (126 - 420 s + 540 s^2 - 315 s^3 + 70 s^4).
constexpr std::array<double, 10> kSmoothstep = {0, 0, 0, 0, 0, 126, -420, 540, -315, 70};

double smoothstep_derivative(double s, int order) {
  double value = 0.0;
  for (int k = 9; k >= order; --k) {
    double c = kSmoothstep[k];
    for (int j = 0; j < order; ++j) c *= (k - j);
    value = value * s + c;
  }
  return value;
}

}  // namespace

std::string CutoffProfile::name() const {
  return shape_ == Shape::CosineSquared ? "cosine_squared" : "smoothstep9";
}

double CutoffProfile::derivative(double r, int order) const {
  if (order < 0 || order > 4) throw ContractViolation("profile derivative order must be in [0,4]");
  if (r <= 1.0) return order == 0 ? 1.0 : 0.0;
  if (r >= 2.0) return 0.0;
  const double s = r - 1.0;
  if (shape_ == Shape::CosineSquared) {
    // (1 + cos(pi s)) / 2
    const double pi = std::numbers::pi;
    const double base = 0.5 * std::pow(pi, order) * std::cos(pi * s + order * pi / 2);
    return order == 0 ? 0.5 + base : base;
  }
  const double v = smoothstep_derivative(s, order);
  return order == 0 ? 1.0 - v : -v;
}

double CutoffProfile::tilde(double r) const {
  return derivative(r, 0) + r * derivative(r, 1);
}

double CutoffProfile::tilde_derivative(double r) const {
  return 2.0 * derivative(r, 1) + r * derivative(r, 2);
}

// ---------------------------------------------------------------------------

bool is_dyadic(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) return false;
  int exponent = 0;
  return std::frexp(x, &exponent) == 0.5;
}

namespace {
double checked(double n) {
  if (!is_dyadic(n)) throw ContractViolation("band frequency must be a positive power of two");
  return n;
}
}  // namespace

DyadicBand DyadicBand::at(double n) { return {Kind::At, checked(n), n}; }
DyadicBand DyadicBand::below(double n) { return {Kind::Below, checked(n), n}; }
DyadicBand DyadicBand::above(double n) { return {Kind::Above, checked(n), n}; }
DyadicBand DyadicBand::below_eq(double n) { return {Kind::BelowEq, checked(n), n}; }
DyadicBand DyadicBand::above_eq(double n) { return {Kind::AboveEq, checked(n), n}; }
DyadicBand DyadicBand::range(double m, double n) {
  if (!(checked(m) <= checked(n))) throw ContractViolation("dyadic range requires M <= N");
  return {Kind::Range, n, m};
}

double DyadicBand::symbol(double rho, const CutoffProfile& phi) const {
  if (!(n > 0.0) || (kind == Kind::Range && !(m > 0.0))) {
    throw ContractViolation("dyadic band frequencies must be positive");
  }
  switch (kind) {
    case Kind::At:      return phi(rho / n) - phi(2.0 * rho / n);
    case Kind::BelowEq: return phi(rho / n);
    case Kind::Below:   return phi(2.0 * rho / n);
    case Kind::Above:   return 1.0 - phi(rho / n);
    case Kind::AboveEq: return 1.0 - phi(2.0 * rho / n);
    case Kind::Range:   return phi(rho / n) - phi(rho / m);
  }
  return 0.0;
}

}  // namespace cnls
