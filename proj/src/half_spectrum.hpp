#pragma once

// Internal helpers for real fields held as raw real-to-complex half spectra.

#include <cmath>
#include <numbers>

#include "cnls/fft.hpp"
#include "cnls/field.hpp"
#include "cnls/summation.hpp"

namespace cnls::detail {

/// Raw (unnormalized, index-origin) half spectrum of a real field.
inline ComplexBuffer half_transform(const RealField& f) {
  ComplexBuffer half(fft::half_size(f.grid.n()));
  fft::forward_real(f.data, half, f.grid.n());
  return half;
}

/// Wavevector of one half-spectrum entry.
struct HalfMode {
  std::size_t flat;
  Vec3 xi;          // cycles per unit length
  long norm2;       // integer |k|^2
  bool nyquist;     // on any Nyquist plane
  double weight;    // 1 on the k_z = 0 and k_z = n/2 planes, 2 elsewhere
};

/// Calls f(HalfMode) for every entry of the n x n x (n/2+1) half spectrum.
template <typename F>
void for_each_half(const Grid& g, F&& f) {
  const int n = g.n();
  const int nk = n / 2 + 1;
  const double inv_l = 1.0 / g.box_length();
  std::size_t flat = 0;
  for (int i = 0; i < n; ++i) {
    const long a = g.wavenumber(i);
    for (int j = 0; j < n; ++j) {
      const long b = g.wavenumber(j);
      for (int k = 0; k < nk; ++k, ++flat) {
        const long c = k;
        const bool edge = k == 0 || k == n / 2;
        f(HalfMode{flat, Vec3{a * inv_l, b * inv_l, c * inv_l}, a * a + b * b + c * c,
                   i == n / 2 || j == n / 2 || k == n / 2, edge ? 1.0 : 2.0});
      }
    }
  }
}

/// int f(y) int K(x - y) g(x) dx dy for real f, g given as raw half spectra
/// and conj_kernel(mode) = conj of the continuum transform of K at mode.xi.
template <typename KernelFn>
double pair_with_kernel(const Grid& g, const ComplexBuffer& f, const ComplexBuffer& h,
                        const KernelFn& conj_kernel) {
  const double cell = g.cell_volume();
  const double scale = cell * cell / (g.box_length() * g.box_length() * g.box_length());
  std::vector<double> terms(f.size());
  for_each_half(g, [&](const HalfMode& m) {
    terms[m.flat] = m.weight * std::real(std::conj(f[m.flat]) * h[m.flat] * conj_kernel(m));
  });
  return scale * pairwise_sum(std::span<const double>(terms));
}

}  // namespace cnls::detail
