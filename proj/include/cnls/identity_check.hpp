#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cnls/check_report.hpp"
#include "cnls/evolution.hpp"
#include "cnls/slice.hpp"

namespace cnls {

/// What an identity check needs from one record: the quantities that get
/// differentiated in time (`lhs`) and the right-hand side they must match
/// (`rhs`), component by component. Scalar identities use one-sample buffers.
struct IdentitySlice {
  std::vector<RealBuffer> lhs;
  std::vector<RealBuffer> rhs;
  /// Multiplies spatial sums: h^3 for fields, 1 for scalars.
  double cell_weight = 1.0;
};

/// Streaming verifier of an identity d/dt lhs = rhs.
///
/// Records arrive one at a time; the time derivative at the middle of every
/// window of five consecutive records is the fourth-order central difference
/// [1/12, -2/3, 0, 2/3, -1/12] / dt. The residual is a relative L^2 norm
/// over the interior records (space, and trapezoid in time), normalized
/// by the same norm of the differenced term. Only five slices are ever held.
class IdentityMonitor {
 public:
  using SliceFn = std::function<IdentitySlice(double t, SliceQuantities& q)>;

  IdentityMonitor(std::string name, SliceFn slice);

  void observe(double t, SliceQuantities& q);
  /// Extra step applied to the report by finish() (metadata, side results).
  void set_finalizer(std::function<void(CheckReport&)> f) { finalizer_ = std::move(f); }
  std::size_t records() const { return records_; }
  /// Throws ContractViolation with fewer than five records or non-uniform spacing.
  CheckReport finish() const;
  /// Relative residual restricted to centers with t_lo <= t <= t_hi.
  double relative_residual_over(double t_lo, double t_hi) const;
  /// First and last center time.
  double first_center() const;
  double last_center() const;
  /// Per-center (t, squared residual, squared reference), spatially summed.
  struct Center {
    double t, residual2, reference2;
  };
  const std::vector<Center>& centers() const { return centers_; }

 private:
  std::string name_;
  SliceFn slice_;
  std::function<void(CheckReport&)> finalizer_;
  std::deque<IdentitySlice> window_;
  std::deque<double> times_;
  std::size_t records_ = 0;
  double first_spacing_ = 0.0;
  bool uniform_ = true;
  std::vector<Center> centers_;
  std::pair<double, double> window_sums(double t_lo, double t_hi) const;
  double worst_pointwise_ = 0.0;
};

/// Report of `fine` with its convergence order measured against a companion
/// run with `ratio` times larger records. Both residuals are restricted to the
/// common interior window, so the order reflects the spacing alone.
CheckReport convergence_report(const IdentityMonitor& fine, const IdentityMonitor& coarse,
                               double ratio = 2.0);

/// Feeds every record of `series` to `monitor` and returns its report.
CheckReport run_monitor(IdentityMonitor& monitor, const FieldSeries& series, Coupling mu);

}  // namespace cnls
