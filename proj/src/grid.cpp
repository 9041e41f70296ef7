#include "cnls/grid.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "cnls/error.hpp"
#include "cnls/field.hpp"

namespace cnls {

Grid::Grid(int n_per_axis, double box_length)
    : n_(n_per_axis), length_(box_length) {
  if (n_ < 2 || !std::has_single_bit(static_cast<unsigned>(n_))) {
    throw ContractViolation("grid size must be a power of two >= 2, got " +
                            std::to_string(n_));
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw ContractViolation("box length must be positive and finite");
  }
}

double Grid::cell_volume() const {
  const double h = spacing();
  return h * h * h;
}

std::array<int, 3> Grid::unflatten(std::size_t flat) const {
  const auto n = static_cast<std::size_t>(n_);
  return {static_cast<int>(flat / (n * n)), static_cast<int>((flat / n) % n),
          static_cast<int>(flat % n)};
}

Vec3 Grid::position(std::size_t flat) const {
  const auto [i, j, k] = unflatten(flat);
  return {coordinate(i), coordinate(j), coordinate(k)};
}

Vec3 Grid::frequency(std::size_t flat) const {
  const auto [i, j, k] = unflatten(flat);
  return {wavenumber(i) / length_, wavenumber(j) / length_,
          wavenumber(k) / length_};
}

long Grid::wavenumber_norm2(std::size_t flat) const {
  const auto [i, j, k] = unflatten(flat);
  const long a = wavenumber(i), b = wavenumber(j), c = wavenumber(k);
  return a * a + b * b + c * c;
}

double Grid::frequency_norm2(std::size_t flat) const {
  return static_cast<double>(wavenumber_norm2(flat)) / (length_ * length_);
}

bool Grid::is_nyquist(std::size_t flat) const {
  const auto [i, j, k] = unflatten(flat);
  const int half = n_ / 2;
  return i == half || j == half || k == half;
}

double Grid::wraparound_horizon() const {
  return length_ * spacing() / (4.0 * std::numbers::pi);
}

// ---------------------------------------------------------------------------

ComplexField::ComplexField(const Grid& grid, Representation rep)
    : grid_(grid), rep_(rep), data_(grid.size(), Complex{}) {}

ComplexField::ComplexField(const Grid& grid, Representation rep,
                           ComplexBuffer data)
    : grid_(grid), rep_(rep), data_(std::move(data)) {
  if (data_.size() != grid_.size()) {
    throw ContractViolation("field data size does not match grid");
  }
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) {
    throw ContractViolation(std::string(what) + ": fields live on different grids");
  }
}

void require_spatial(const ComplexField& f, const char* what) {
  if (!f.is_spatial()) {
    throw ContractViolation(std::string(what) + ": field must be spatial");
  }
}

ComplexField to_complex(const RealField& f) {
  ComplexField out(f.grid, Representation::Spatial);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  return out;
}

RealField real_part(const ComplexField& f) {
  RealField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

RealField imag_part(const ComplexField& f) {
  RealField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].imag();
  return out;
}

}  // namespace cnls
