#include "cnls/identity_check.hpp"

#include <algorithm>
#include <cmath>

#include "cnls/error.hpp"
#include "cnls/format.hpp"
#include "cnls/summation.hpp"

namespace cnls {
namespace {
constexpr std::array<double, 5> kStencil{1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0};
}

IdentityMonitor::IdentityMonitor(std::string name, SliceFn slice)
    : name_(std::move(name)), slice_(std::move(slice)) {}

void IdentityMonitor::observe(double t, SliceQuantities& q) {
  if (!times_.empty()) {
    const double step = t - times_.back();
    if (records_ == 1) first_spacing_ = step;
    if (std::abs(step - first_spacing_) > 1e-9 * std::abs(first_spacing_)) uniform_ = false;
  }
  window_.push_back(slice_(t, q));
  times_.push_back(t);
  ++records_;
  if (window_.size() > 5) {
    window_.pop_front();
    times_.pop_front();
  }
  if (window_.size() < 5) return;

  const double dt = (times_[4] - times_[0]) / 4.0;
  const IdentitySlice& mid = window_[2];
  double res = 0.0, ref = 0.0;
  for (std::size_t c = 0; c < mid.lhs.size(); ++c) {
    const std::size_t count = mid.lhs[c].size();
    std::vector<double> r2(count), d2(count);
    for (std::size_t i = 0; i < count; ++i) {
      double d = 0.0;
      for (int s = 0; s < 5; ++s) d += kStencil[s] * window_[s].lhs[c][i];
      d /= dt;
      const double r = d - mid.rhs[c][i];
      r2[i] = r * r;
      d2[i] = d * d;
      worst_pointwise_ = std::max(worst_pointwise_, std::abs(r));
    }
    res += pairwise_sum(std::span<const double>(r2));
    ref += pairwise_sum(std::span<const double>(d2));
  }
  centers_.push_back({times_[2], dt * mid.cell_weight * res, dt * mid.cell_weight * ref});
}

CheckReport IdentityMonitor::finish() const {
  if (records_ < 5) {
    throw ContractViolation(name_ + ": identity checks need at least 5 records");
  }
  if (!uniform_) throw ContractViolation(name_ + ": records are not uniformly spaced");
  const auto [res2, ref2] = window_sums(-HUGE_VAL, HUGE_VAL);
  CheckReport r = CheckReport::from_norms(name_, std::sqrt(res2), std::sqrt(ref2));
  r.metadata["record_spacing"] = fmt_double(first_spacing_);
  r.metadata["records"] = std::to_string(records_);
  r.metadata["interior_records"] = std::to_string(centers_.size());
  r.metadata["max_pointwise_residual"] = fmt_double(worst_pointwise_);
  if (finalizer_) finalizer_(r);
  return r;
}

// Trapezoid in time over the centers inside [t_lo, t_hi].
std::pair<double, double> IdentityMonitor::window_sums(double t_lo, double t_hi) const {
  const double slack = 1e-9 * std::abs(first_spacing_);
  std::vector<const Center*> in;
  for (const Center& c : centers_) {
    if (c.t >= t_lo - slack && c.t <= t_hi + slack) in.push_back(&c);
  }
  double res2 = 0.0, ref2 = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double w = (in.size() > 1 && (i == 0 || i + 1 == in.size())) ? 0.5 : 1.0;
    res2 += w * in[i]->residual2;
    ref2 += w * in[i]->reference2;
  }
  return {res2, ref2};
}

double IdentityMonitor::relative_residual_over(double t_lo, double t_hi) const {
  const auto [res2, ref2] = window_sums(t_lo, t_hi);
  return std::sqrt(res2) / std::max(std::sqrt(ref2), 1e-300);
}

double IdentityMonitor::first_center() const {
  if (centers_.empty()) throw ContractViolation(name_ + ": no interior records yet");
  return centers_.front().t;
}

double IdentityMonitor::last_center() const {
  if (centers_.empty()) throw ContractViolation(name_ + ": no interior records yet");
  return centers_.back().t;
}

CheckReport convergence_report(const IdentityMonitor& fine, const IdentityMonitor& coarse,
                               double ratio) {
  CheckReport r = fine.finish();
  const double lo = std::max(fine.first_center(), coarse.first_center());
  const double hi = std::min(fine.last_center(), coarse.last_center());
  const double f = fine.relative_residual_over(lo, hi);
  const double c = coarse.relative_residual_over(lo, hi);
  r.convergence_order = observed_order(c, f, ratio);
  r.metadata["order_window"] = fmt_double(lo) + "," + fmt_double(hi);
  r.metadata["coarse_relative_residual"] = fmt_double(c);
  return r;
}

CheckReport run_monitor(IdentityMonitor& monitor, const FieldSeries& series, Coupling mu) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    SliceQuantities q(series[i], mu);
    monitor.observe(series.time(i), q);
  }
  return monitor.finish();
}

}  // namespace cnls
