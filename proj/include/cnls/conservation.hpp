#pragma once

#include <array>
#include <vector>

#include "cnls/check_report.hpp"
#include "cnls/cutoff.hpp"
#include "cnls/evolution.hpp"
#include "cnls/identity_check.hpp"
#include "cnls/spectral.hpp"

namespace cnls {

/// Mass, momentum, and energy densities of one slice, with
/// F(z) = mu z^3 / 3 and G(z) = z F'(z) - F(z) = (2/3) mu z^3.
struct DensitySet {
  RealField t00;                      // |u|^2
  VectorField t0j;                    // 2 Im(conj(u) d_j u)
  std::array<RealField, 6> l;         // L_jk = -d_j d_k |u|^2 + 4 Re(conj(d_j u) d_k u)
  RealField g;                        // G(|u|^2)
  RealField energy;                   // |grad u|^2 / 2 + F(|u|^2) / 2

  const RealField& l_at(int j, int k) const { return l[static_cast<std::size_t>(sym_index(j, k))]; }
  /// T_jk = L_jk + 2 delta_jk G.
  RealField t_jk(int j, int k) const;
};

/// Gradients are spectral. u must be spatial.
DensitySet densities(const ComplexField& u, Coupling mu);

double total_mass(const ComplexField& u);
Vec3 total_momentum(const ComplexField& u);
/// E = ||u||_{H^1 hom}^2 / 2 + (mu / 6) ||u||_6^6, kinetic part by Plancherel.
double total_energy(const ComplexField& u, Coupling mu);

/// {f, g}_m = Im(f conj(g)).
RealField mass_bracket(const ComplexField& f, const ComplexField& g);
/// {f, g}_p = Re(f grad conj(g) - g grad conj(f)).
VectorField momentum_bracket(const ComplexField& f, const ComplexField& g);

/// {|u|^4 u, u}_m = 0 and {|u|^4 u, u}_p = -(2/3) grad |u|^6 at one slice.
struct BracketCancellation {
  double mass_max = 0.0;            // max |{N, u}_m| / max |N| |u|
  double momentum_residual = 0.0;   // ||{N, u}_p + (2/3) grad |u|^6|| / ||(2/3) grad |u|^6||
};
BracketCancellation bracket_cancellation(const ComplexField& u);
/// Worst case over the records: reports "mass_bracket_cancellation"
/// (pointwise, relative to max |N||u|) and "momentum_bracket_cancellation".
std::vector<CheckReport> check_bracket_cancellation(const FieldSeries& series);

/// Streaming monitors behind the check_* functions below.
IdentityMonitor local_mass_monitor(Coupling mu);
IdentityMonitor local_momentum_monitor(Coupling mu);
IdentityMonitor local_energy_monitor(Coupling mu);
IdentityMonitor frequency_localized_mass_monitor(const DyadicBand& cutoff, Coupling mu);

/// d_t T00 + d_j T0j = 2 {N, u}_m with N = mu |u|^4 u.
CheckReport check_local_mass(const FieldSeries& series, Coupling mu);
/// d_t T0j + d_k T_jk = 0.
CheckReport check_local_momentum(const FieldSeries& series, Coupling mu);
/// d_t [|grad u|^2/2 + F/2] + d_j [Im(conj(u_k) u_kj) - F' Im(u conj(u_j))] = 0.
CheckReport check_local_energy(const FieldSeries& series, Coupling mu);
/// dL/dt = 2 h^3 sum {P_hi N, u_hi}_m with L = ||P_hi u||^2 and P_hi = AboveEq(N).
/// Metadata carries the band-mass variation max|L - L(0)| / L(0) and the
/// leak integral int |dL/dt| dt.
CheckReport frequency_localized_mass_check(const FieldSeries& series, const DyadicBand& cutoff,
                                           Coupling mu);

}  // namespace cnls
