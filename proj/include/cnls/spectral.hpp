#pragma once

#include <array>
#include <functional>
#include <vector>

#include "cnls/cutoff.hpp"
#include "cnls/field.hpp"

namespace cnls {

enum class Direction { Forward, Inverse };

/// Spatial <-> spectral change of representation. Throws ContractViolation
/// when the field is not in the direction's source representation.
ComplexField transform(const ComplexField& field, Direction direction);
ComplexField to_spectral(const ComplexField& field);
ComplexField to_spatial(const ComplexField& field);

/// A lattice wavevector as seen by a Fourier multiplier.
struct Wavevector {
  Vec3 xi;        // cycles per unit length
  double norm2;   // |xi|^2
  bool nyquist;   // lies on a Nyquist plane
};

using Symbol = std::function<Complex(const Wavevector&)>;

/// What to do with a non-finite symbol value at the zero mode.
enum class ZeroModePolicy { Error, SetZero };

/// Multiplies spectral data by m(xi) and returns the result in `out`
/// representation. A non-finite value at xi = 0 is either an error or mapped
/// to 0 according to `policy`; a non-finite value anywhere else is an error.
ComplexField multiplier(const ComplexField& field, const Symbol& m,
                        Representation out = Representation::Spatial,
                        ZeroModePolicy policy = ZeroModePolicy::Error);

/// Radial multiplier m(|xi|); evaluated once per distinct lattice |xi|^2.
ComplexField radial_multiplier(const ComplexField& field,
                               const std::function<double(double)>& m,
                               Representation out = Representation::Spatial);

ComplexField lp_project(const ComplexField& field, const DyadicBand& band,
                        Representation out = Representation::Spatial);

/// Resolvable dyadic frequencies 2/L, 4/L, ..., n/(2L).
std::vector<double> resolvable_bands(const Grid& grid);
/// Dyadic 1/L, 2/L, ..., n/L. The projectors P_N over these bands sum to the
/// identity on fields with zero mean.
std::vector<double> lattice_bands(const Grid& grid);

/// Partial derivative d/dx_axis. Nyquist modes are dropped so the derivative
/// of real data stays real.
ComplexField derivative(const ComplexField& field, int axis,
                        Representation out = Representation::Spatial);
std::array<ComplexField, 3> gradient(const ComplexField& field);
/// Packed index of the symmetric pair (j, k): 00 01 02 11 12 22.
constexpr int sym_index(int j, int k) {
  if (j > k) return sym_index(k, j);
  return j == 0 ? k : (j == 1 ? 2 + k : 5);
}

/// Derivatives of real fields through the real-to-complex half spectrum.
/// Same symbols and Nyquist treatment as derivative(), at half the cost.
RealField real_derivative(const RealField& f, int axis);
/// sum_k d_k f_k.
RealField real_divergence(const RealField& f0, const RealField& f1, const RealField& f2);
/// d_j d_k f packed by sym_index.
std::array<RealField, 6> real_hessian(const RealField& f);

ComplexField laplacian(const ComplexField& field,
                       Representation out = Representation::Spatial);

/// e^{it Delta}: each mode times exp(-4 pi^2 i t |xi|^2).
ComplexField free_propagate(const ComplexField& field, double t);

/// ||u||_{L^2} = (h^3 sum |u|^2)^{1/2}, pairwise summed.
double l2_norm(const ComplexField& field);
/// ||u||_{L^p} for p in [1, inf]; p = infinity gives the max modulus.
double lp_norm(const ComplexField& field, double p);
double max_modulus(const ComplexField& field);
/// h^3 sum f for a real field.
double integrate(const RealField& f);
double l2_norm(const RealField& f);

/// ||(|grad|)^s f||_{L^2} (homogeneous) or ||<grad>^s f||_{L^2}, where |grad|
/// has symbol 2 pi |xi| and <grad> has symbol (1 + 4 pi^2 |xi|^2)^{1/2}.
/// A homogeneous norm with s < 0 requires a vanishing mean.
double sobolev_norm(const ComplexField& field, double s, bool homogeneous);

/// Pointwise helpers.
RealField modulus_squared(const ComplexField& f);
ComplexField scale(const ComplexField& f, Complex c);
ComplexField add(const ComplexField& a, const ComplexField& b, Complex cb = 1.0);
/// ||a - b||_{L^2}.
double l2_distance(const ComplexField& a, const ComplexField& b);

}  // namespace cnls
