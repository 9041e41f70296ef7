#pragma once

#include <array>
#include <optional>

#include "cnls/evolution.hpp"
#include "cnls/field.hpp"

namespace cnls {

/// Per-slice derived quantities, computed on first use and cached, so that
/// several checks fed the same record share the transforms.
class SliceQuantities {
 public:
  SliceQuantities(const ComplexField& u, Coupling mu);

  const Grid& grid() const { return u_.grid(); }
  Coupling mu() const { return mu_; }
  const ComplexField& u() const { return u_; }

  const ComplexField& spectrum();                   // u_hat
  const std::array<ComplexField, 3>& grad();        // d_j u
  const ComplexField& hessian(int j, int k);        // d_j d_k u
  const RealField& rho();                           // |u|^2
  const VectorField& t0j();                         // 2 Im(conj(u) d_j u)
  const std::array<RealField, 6>& rho_hessian();    // d_j d_k |u|^2
  const std::array<RealField, 6>& grad_products();  // Re(conj(d_j u) d_k u)
  const std::array<RealField, 6>& l();              // L_jk
  const RealField& g();                             // G(|u|^2) = (2/3) mu |u|^6
  const ComplexField& nonlinearity();               // N = mu |u|^4 u
  const RealField& mass_bracket();                  // {N, u}_m
  const VectorField& momentum_bracket();            // {N, u}_p

 private:
  ComplexField u_;
  Coupling mu_;
  std::optional<ComplexField> spectrum_;
  std::optional<std::array<ComplexField, 3>> grad_;
  std::optional<std::array<ComplexField, 6>> hessian_;
  std::optional<RealField> rho_;
  std::optional<VectorField> t0j_;
  std::optional<std::array<RealField, 6>> rho_hessian_;
  std::optional<std::array<RealField, 6>> grad_products_;
  std::optional<std::array<RealField, 6>> l_;
  std::optional<RealField> g_;
  std::optional<ComplexField> nonlinearity_;
  std::optional<RealField> mass_bracket_;
  std::optional<VectorField> momentum_bracket_;
};

}  // namespace cnls
