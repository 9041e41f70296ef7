#pragma once

#include <array>
#include <cstddef>

namespace cnls {

using Vec3 = std::array<double, 3>;

/// Periodic cube [-L/2, L/2)^3 sampled with n points per axis.
///
/// Sample (i, j, k) sits at x = ((i - n/2) h, (j - n/2) h, (k - n/2) h) with
/// h = L / n. The reciprocal lattice holds the frequencies
/// xi = (a, b, c) / L with a, b, c in {-n/2, ..., n/2 - 1}, measured in
/// cycles per unit length (the transform kernel is exp(-2 pi i x.xi)).
class Grid {
 public:
  /// Throws ContractViolation unless n is a power of two (n >= 2) and L > 0.
  Grid(int n_per_axis, double box_length);

  int n() const { return n_; }
  double box_length() const { return length_; }
  double spacing() const { return length_ / n_; }
  double cell_volume() const;
  std::size_t size() const {
    return static_cast<std::size_t>(n_) * n_ * n_;
  }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }
  std::array<int, 3> unflatten(std::size_t flat) const;

  /// Signed lattice wavenumber of an FFT index: i for i < n/2, i - n above.
  int wavenumber(int index) const { return index < n_ / 2 ? index : index - n_; }
  double coordinate(int index) const { return (index - n_ / 2) * spacing(); }
  Vec3 position(std::size_t flat) const;
  Vec3 frequency(std::size_t flat) const;
  double frequency_norm2(std::size_t flat) const;
  /// Integer |a|^2 + |b|^2 + |c|^2 of the wavenumber triple.
  long wavenumber_norm2(std::size_t flat) const;
  /// True on the Nyquist plane of any axis (index n/2).
  bool is_nyquist(std::size_t flat) const;

  /// Largest frequency magnitude representable along an axis, n / (2 L).
  double nyquist_frequency() const { return n_ / (2.0 * length_); }
  /// Time for the fastest lattice mode to cross half the box, L h / (4 pi).
  double wraparound_horizon() const;

  bool operator==(const Grid&) const = default;

 private:
  int n_;
  double length_;
};

}  // namespace cnls
