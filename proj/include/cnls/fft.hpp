#pragma once

#include <span>

#include "cnls/field.hpp"

namespace cnls::fft {

/// In-place unnormalized 3-D DFT on an n^3 buffer allocated with
/// AlignedAllocator. Plans are built once per (n, sign) with FFTW_ESTIMATE,
/// which keeps the arithmetic identical from run to run.
void forward(std::span<Complex> data, int n);
void backward(std::span<Complex> data, int n);

/// Number of complex entries in the half spectrum of a real n^3 field.
inline std::size_t half_size(int n) {
  return static_cast<std::size_t>(n) * n * (n / 2 + 1);
}
/// Unnormalized real-to-complex transform into the n x n x (n/2+1) half
/// spectrum. Input is left intact.
void forward_real(std::span<const double> in, std::span<Complex> out, int n);
/// Unnormalized complex-to-real inverse. The input half spectrum is destroyed.
void backward_real(std::span<Complex> in, std::span<double> out, int n);

}  // namespace cnls::fft
