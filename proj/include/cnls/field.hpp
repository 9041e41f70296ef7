#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <span>
#include <vector>

#include "cnls/grid.hpp"

namespace cnls {

using Complex = std::complex<double>;

/// 64-byte aligned storage so every buffer satisfies FFTW's SIMD alignment
/// and a single plan per grid size can be reused on any field.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t count) {
    return static_cast<T*>(::operator new(count * sizeof(T), kAlignment));
  }
  void deallocate(T* p, std::size_t) noexcept {
    ::operator delete(p, kAlignment);
  }
  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

using ComplexBuffer = std::vector<Complex, AlignedAllocator<Complex>>;
using RealBuffer = std::vector<double, AlignedAllocator<double>>;

enum class Representation { Spatial, Spectral };

/// One complex scalar field on a Grid, stored row-major (x slowest).
///
/// Spatial samples are point values u(x). Spectral samples are the continuum
/// transform of the trigonometric interpolant, u_hat(xi) = h^3 sum_x
/// exp(-2 pi i x.xi) u(x), so a constant field A has u_hat(0) = A L^3.
class ComplexField {
 public:
  ComplexField(const Grid& grid, Representation rep);
  ComplexField(const Grid& grid, Representation rep, ComplexBuffer data);

  const Grid& grid() const { return grid_; }
  Representation representation() const { return rep_; }
  bool is_spatial() const { return rep_ == Representation::Spatial; }
  std::size_t size() const { return data_.size(); }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }
  Complex& operator[](std::size_t i) { return data_[i]; }
  const Complex& operator[](std::size_t i) const { return data_[i]; }

  // Used by the transform code, which flips the tag after rewriting data.
  void set_representation(Representation rep) { rep_ = rep; }

 private:
  Grid grid_;
  Representation rep_;
  ComplexBuffer data_;
};

/// Real samples on a grid (densities, currents, weights).
struct RealField {
  Grid grid;
  RealBuffer data;

  explicit RealField(const Grid& g) : grid(g), data(g.size(), 0.0) {}
  RealField(const Grid& g, RealBuffer d) : grid(g), data(std::move(d)) {}
  std::size_t size() const { return data.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
};

using VectorField = std::array<RealField, 3>;

void require_same_grid(const Grid& a, const Grid& b, const char* what);
void require_spatial(const ComplexField& f, const char* what);

ComplexField to_complex(const RealField& f);
RealField real_part(const ComplexField& f);
RealField imag_part(const ComplexField& f);

}  // namespace cnls
