#pragma once

#include <vector>

#include "cnls/check_report.hpp"
#include "cnls/evolution.hpp"
#include "cnls/identity_check.hpp"
#include "cnls/morawetz_weight.hpp"

namespace cnls {

/// V_a = h^3 sum a |u|^2.
double virial_potential(const ComplexField& u, const MorawetzWeight& w,
                        WeightMode mode = WeightMode::Spectral);
/// M_a = h^3 sum a_j 2 Im(conj(u) d_j u), spectral gradients.
double morawetz_action(const ComplexField& u, const MorawetzWeight& w,
                       WeightMode mode = WeightMode::Spectral);

/// Right-hand side of the virial identity at one slice.
struct VirialTerms {
  double bilaplacian = 0.0;  // int (-ΔΔa) |u|^2
  double hessian = 0.0;      // 4 int a_jk Re(conj(d_j u) d_k u)
  double bracket = 0.0;      // 2 int a_j {N, u}_p^j
  double total() const { return bilaplacian + hessian + bracket; }
};

/// In Lattice mode the delta part of ΔΔa contributes 8 pi |u(y)|^2, with
/// |u(y)|^2 read off the trigonometric interpolant.
VirialTerms virial_terms(const ComplexField& u, const MorawetzWeight& w, Coupling mu,
                         WeightMode mode = WeightMode::Spectral);

/// d_t V_a = M_a + 2 int a {N, u}_m.
IdentityMonitor vdot_monitor(const MorawetzWeight& w, Coupling mu,
                             WeightMode mode = WeightMode::Spectral);
/// d_t M_a = VirialTerms::total().
IdentityMonitor virial_monitor(const MorawetzWeight& w, Coupling mu,
                               WeightMode mode = WeightMode::Spectral);
CheckReport check_Vdot(const FieldSeries& series, const MorawetzWeight& w, Coupling mu);
CheckReport check_virial_identity(const FieldSeries& series, const MorawetzWeight& w,
                                  Coupling mu);

/// M^interact = int |u(y)|^2 M^y dy with M^y the Morawetz action of the weight
/// of radius R centred at y, evaluated as three convolutions.
///
/// Lattice mode is the double sum h^6 sum_y sum_x |u(y)|^2 K_j(x - y) T_0j(x)
/// with the sampled kernel K_j(z) = chi~(|z|/R) z_j/|z|, K_j(0) = 0. Spectral
/// mode uses the band-limited weight. Throws "kernel wrap-around" for R > L/4.
double interaction_potential(const ComplexField& u, double radius,
                             WeightMode mode = WeightMode::Lattice,
                             CutoffProfile profile = CutoffProfile(CutoffProfile::Shape::Smoothstep));

/// Terms of the interaction virial identity at one slice. Everything except
/// quartic_term and error_band_term is signed.
struct InteractionTermBreakdown {
  double quartic_term = 0.0;           // 8 pi h^3 sum |u|^4
  double quartic_kernel_term = 0.0;    // the same term through the band-limited kernel
  double angular_term = 0.0;           // 4 int int |u(y)|^2 chi~/|x-y| |angular grad u(x)|^2
  double momentum_bracket_term = 0.0;  // 2 int int |u(y)|^2 K_j(x-y) {N,u}_p^j(x)
  double cross_term = 0.0;             // -int int T_0k(y) a_jk(x-y) T_0j(x)
  double error_band_term = 0.0;        // the O(.) integral evaluated, a bound
  double mass_bracket_term = 0.0;      // 2 int {N,u}_m(y) M^y dy
  double remainder_term = 0.0;         // total minus the named terms
  double total = 0.0;                  // d_t M^interact by the exact identity
  double min_chi_tilde = 0.0;
};

InteractionTermBreakdown interaction_breakdown(
    const ComplexField& u, double radius, Coupling mu,
    CutoffProfile profile = CutoffProfile(CutoffProfile::Shape::Smoothstep));

/// d_t M^interact = int |u(y)|^2 d_t M^y dy + int d_t|u|^2(y) M^y dy with the
/// spectral weight; the left side is differenced in time.
IdentityMonitor interaction_derivative_monitor(
    double radius, Coupling mu,
    CutoffProfile profile = CutoffProfile(CutoffProfile::Shape::Smoothstep));
CheckReport check_interaction_derivative(const FieldSeries& series, double radius, Coupling mu);

/// Streaming form of interaction_inequality_probe.
class InteractionInequalityMonitor {
 public:
  explicit InteractionInequalityMonitor(Coupling mu);
  void observe(double t, const ComplexField& u);
  double lhs() const;
  double rhs() const;
  double ratio() const;
  CheckReport finish() const;

 private:
  Coupling mu_;
  std::vector<double> t_, quartic_;
  double sup_half_ = 0.0, mass0_ = 0.0;
};

/// LHS = int int |u|^4 (trapezoid in t), RHS = ||u(0)||_2^2 sup_t ||u(t)||_{H^{1/2}}^2.
/// The ratio is the report's fitted_constant (0 for a zero field). Refuses
/// focusing data.
CheckReport interaction_inequality_probe(const FieldSeries& series, Coupling mu);

/// int int |P_{>=N*} u|^4 dx dt, trapezoid in t. N* must be dyadic and no
/// larger than the top resolvable band times 2.
double frequency_localized_quartic(const FieldSeries& series, double n_star);

/// Streaming form of frequency_localized_quartic.
class FrequencyQuarticMonitor {
 public:
  FrequencyQuarticMonitor(const Grid& grid, double n_star);
  void observe(double t, const ComplexField& u);
  double value() const;

 private:
  DyadicBand band_;
  std::vector<double> t_, quartic_;
};

/// Streaming form of pseudoconformal_check. Time is measured from the first
/// record; the law is evaluated at every even record, where composite
/// Simpson applies.
class PseudoconformalMonitor {
 public:
  explicit PseudoconformalMonitor(Coupling mu, double support_tolerance = 1e-8);
  /// Throws ContractViolation("pseudoconformal weight invalid") when more
  /// than support_tolerance of the mass lies outside the central half-box.
  void observe(double t, const ComplexField& u);
  /// Relative residual: L^2 over the evaluated records of lhs - rhs over the
  /// same norm of lhs.
  CheckReport finish() const;

 private:
  Coupling mu_;
  double tolerance_;
  double t0_ = 0.0;
  double initial_ = 0.0;  // ||x u0||^2
  std::vector<double> times_, sixth_;
  double residual2_ = 0.0, reference2_ = 0.0, worst_outside_ = 0.0;
  std::size_t evaluated_ = 0;
};

/// ||(x + 2it grad)u||^2 + (4/3) t^2 ||u||_6^6 = ||x u0||^2 - (16/3) int_0^t s ||u||_6^6 ds.
CheckReport pseudoconformal_check(const FieldSeries& series, Coupling mu);

/// Values of a scale-invariant quantity along the lambda family
/// rescale_config(config, lambda), and their spread max/min.
struct ScalingProbe {
  std::vector<double> lambdas;
  std::vector<double> values;
  double spread() const;
};

/// interaction_inequality_probe ratio along the family.
ScalingProbe interaction_ratio_scaling(const SimulationConfig& config,
                                       const std::vector<double>& lambdas);
/// frequency_localized_quartic(N*/lambda) * (N*/lambda)^3 along the family.
ScalingProbe quartic_scaling(const SimulationConfig& config, double n_star,
                             const std::vector<double>& lambdas);

}  // namespace cnls
