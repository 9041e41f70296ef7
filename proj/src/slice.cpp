#include "cnls/slice.hpp"

#include "cnls/error.hpp"
#include "cnls/spectral.hpp"

namespace cnls {

SliceQuantities::SliceQuantities(const ComplexField& u, Coupling mu)
    : u_(u.is_spatial() ? u : to_spatial(u)), mu_(mu) {}

const ComplexField& SliceQuantities::spectrum() {
  if (!spectrum_) spectrum_ = to_spectral(u_);
  return *spectrum_;
}

const std::array<ComplexField, 3>& SliceQuantities::grad() {
  if (!grad_) {
    const ComplexField& s = spectrum();
    grad_ = std::array<ComplexField, 3>{derivative(s, 0), derivative(s, 1), derivative(s, 2)};
  }
  return *grad_;
}

const ComplexField& SliceQuantities::hessian(int j, int k) {
  if (!hessian_) {
    const ComplexField& s = spectrum();
    std::array<ComplexField, 3> first{derivative(s, 0, Representation::Spectral),
                                      derivative(s, 1, Representation::Spectral),
                                      derivative(s, 2, Representation::Spectral)};
    hessian_ = std::array<ComplexField, 6>{
        derivative(first[0], 0), derivative(first[0], 1), derivative(first[0], 2),
        derivative(first[1], 1), derivative(first[1], 2), derivative(first[2], 2)};
  }
  return (*hessian_)[static_cast<std::size_t>(sym_index(j, k))];
}

const RealField& SliceQuantities::rho() {
  if (!rho_) rho_ = modulus_squared(u_);
  return *rho_;
}

const VectorField& SliceQuantities::t0j() {
  if (!t0j_) {
    const auto& d = grad();
    VectorField out{RealField(grid()), RealField(grid()), RealField(grid())};
    for (int j = 0; j < 3; ++j) {
      for (std::size_t i = 0; i < u_.size(); ++i) {
        out[j][i] = 2.0 * std::imag(std::conj(u_[i]) * d[j][i]);
      }
    }
    t0j_ = std::move(out);
  }
  return *t0j_;
}

const std::array<RealField, 6>& SliceQuantities::rho_hessian() {
  if (!rho_hessian_) rho_hessian_ = real_hessian(rho());
  return *rho_hessian_;
}

const std::array<RealField, 6>& SliceQuantities::grad_products() {
  if (!grad_products_) {
    const auto& d = grad();
    std::array<RealField, 6> out{RealField(grid()), RealField(grid()), RealField(grid()),
                                 RealField(grid()), RealField(grid()), RealField(grid())};
    for (int j = 0; j < 3; ++j) {
      for (int k = j; k < 3; ++k) {
        RealField& o = out[static_cast<std::size_t>(sym_index(j, k))];
        for (std::size_t i = 0; i < u_.size(); ++i) {
          o[i] = std::real(std::conj(d[j][i]) * d[k][i]);
        }
      }
    }
    grad_products_ = std::move(out);
  }
  return *grad_products_;
}

const std::array<RealField, 6>& SliceQuantities::l() {
  if (!l_) {
    const auto& h = rho_hessian();
    const auto& p = grad_products();
    std::array<RealField, 6> out = h;
    for (std::size_t c = 0; c < 6; ++c) {
      for (std::size_t i = 0; i < u_.size(); ++i) out[c][i] = -h[c][i] + 4.0 * p[c][i];
    }
    l_ = std::move(out);
  }
  return *l_;
}

const RealField& SliceQuantities::g() {
  if (!g_) {
    const RealField& r = rho();
    RealField out(grid());
    const double s = coupling_sign(mu_);
    for (std::size_t i = 0; i < u_.size(); ++i) out[i] = s * (2.0 / 3.0) * r[i] * r[i] * r[i];
    g_ = std::move(out);
  }
  return *g_;
}

const ComplexField& SliceQuantities::nonlinearity() {
  if (!nonlinearity_) nonlinearity_ = cnls::nonlinearity(u_, mu_);
  return *nonlinearity_;
}

const RealField& SliceQuantities::mass_bracket() {
  if (!mass_bracket_) {
    const ComplexField& n = nonlinearity();
    RealField out(grid());
    for (std::size_t i = 0; i < u_.size(); ++i) out[i] = std::imag(n[i] * std::conj(u_[i]));
    mass_bracket_ = std::move(out);
  }
  return *mass_bracket_;
}

const VectorField& SliceQuantities::momentum_bracket() {
  if (!momentum_bracket_) {
    const ComplexField& n = nonlinearity();
    const auto gn = gradient(n);
    const auto& gu = grad();
    VectorField out{RealField(grid()), RealField(grid()), RealField(grid())};
    for (int j = 0; j < 3; ++j) {
      for (std::size_t i = 0; i < u_.size(); ++i) {
        out[j][i] = std::real(n[i] * std::conj(gu[j][i]) - u_[i] * std::conj(gn[j][i]));
      }
    }
    momentum_bracket_ = std::move(out);
  }
  return *momentum_bracket_;
}

}  // namespace cnls
