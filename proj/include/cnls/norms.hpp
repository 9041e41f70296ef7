#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "cnls/check_report.hpp"
#include "cnls/cutoff.hpp"
#include "cnls/evolution.hpp"

namespace cnls {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Exponents with 2/q + 3/r = 3/2, q in [2, inf], r in [2, 6].
struct AdmissiblePair {
  double q;
  double r;

  /// Throws ContractViolation when the pair misses the line by more than 1e-12.
  static AdmissiblePair make(double q, double r);
};

/// (inf,2) (10,30/13) (5,30/11) (4,3) (10/3,10/3) (2,6).
const std::vector<AdmissiblePair>& listed_admissible_pairs();

struct SpacetimeNormSpec {
  double q = 2.0;
  double r = 2.0;
  int derivative = 0;                 // k in {0, 1, 2}
  std::optional<DyadicBand> band;     // applied before differentiating
};

/// (sum_t dt (h^3 sum_x |grad^k u|^r)^{q/r})^{1/q}, trapezoid weights in t,
/// max at q or r = inf. |grad u| is the Euclidean length of the gradient and
/// |grad^2 u| the Frobenius norm of the Hessian. A single record has zero
/// time measure, so finite q needs at least two records.
double spacetime_norm(const FieldSeries& series, const SpacetimeNormSpec& spec);

/// Streaming form of spacetime_norm.
class SpacetimeNormMonitor {
 public:
  explicit SpacetimeNormMonitor(SpacetimeNormSpec spec);
  void observe(double t, const ComplexField& u);
  double value() const;

 private:
  SpacetimeNormSpec spec_;
  std::vector<double> times_, values_;
};

/// sup over listed_admissible_pairs() of (sum_N ||P_N grad^k u||_{L^q L^r}^2)^{1/2}
/// with N over lattice_bands(), which decompose every non-constant field.
double strichartz_s_norm(const FieldSeries& series, int k);

/// Per-pair values of strichartz_s_norm, in listed order.
std::vector<double> strichartz_components(const FieldSeries& series, int k);

/// Streaming form of strichartz_components; keeps one number per record,
/// band and pair.
class StrichartzMonitor {
 public:
  StrichartzMonitor(const Grid& grid, int k);
  void observe(double t, const ComplexField& u);
  std::vector<double> components() const;
  double value() const;

 private:
  int k_;
  std::vector<double> bands_;
  std::vector<double> times_;
  std::vector<std::vector<std::vector<double>>> values_;  // [pair][band][record]
};

struct BilinearOptions {
  int n = 128;
  double box_length = 1.0;
  std::vector<int> multiples = {1, 2, 4, 8};   // carrier m (2, 3, 6) / L, N_hi = 8 m / L
  double packet_width = 0.06;                  // in units of L
  double companion_width = 0.06;
  double window = 4e-3;                        // in units of L^2
  int samples_per_transit = 6;
  std::uint64_t seed = 0;                      // random phases of the packets
  bool companion_zero = false;                 // g = 0
};

/// Q(N_hi) = ||(e^{it Delta} f)(e^{it Delta} g)||_{L^2_{t,x}} over [0, window],
/// with f a unit-L^2 packet projected to band N_hi and g a unit-L^2 low
/// frequency lump at the same point. The packets travel along (2, 3, 6),
/// whose orbit on the torus stays 0.28 L away from the lump's images for
/// several box lengths. fitted_constant is the slope of log Q against
/// log N_hi, thresholded by max_fitted = -0.4 (0 and unthresholded for g = 0).
/// Throws ContractViolation("... wrap-around horizon ...") when the fastest
/// packet would come back to the lump inside the window.
CheckReport bilinear_strichartz_experiment(const BilinearOptions& options = {});

struct BernsteinOptions {
  int n = 128;
  double box_length = 1.0;
  std::vector<double> bands = {8.0, 16.0, 32.0};  // in units of 1/L
  std::vector<std::pair<double, double>> pairs = {{2.0, 6.0}, {2.0, kInfinity}, {1.0, 2.0}};
  int samples = 4;                                // random fields per band
  int spikes = 3;
  std::uint64_t seed = 1;
};

struct BernsteinRow {
  double band;
  double p, q;
  double ratio;            // median over samples of ||P_N f||_q / ||P_N f||_p
  double fitted_constant;  // ratio / N^{3/p - 3/q}
};

struct BernsteinResult {
  std::vector<BernsteinRow> rows;
  /// One report per (p, q): fitted_constant = fitted slope, metadata carries
  /// the expected exponent and the constant spread max C / min C.
  std::vector<CheckReport> reports;
};

/// Random fields are P_N applied to a few random point masses (seeded).
BernsteinResult bernstein_sweep(const BernsteinOptions& options = {});

/// N ||P_{>=N} f||_2 / ||(|grad| / 2 pi) P_{>=N} f||_2: the constant of
/// ||P_{>=N} f|| <= C N^{-1} ||grad P_{>=N} f|| in cycle units.
double highfreq_gradient_constant(const ComplexField& f, double n_cut);

}  // namespace cnls
