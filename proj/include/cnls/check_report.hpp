#pragma once

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace cnls {

/// Outcome of one identity or inequality verification.
struct CheckReport {
  std::string name;
  double residual_norm = 0.0;
  double reference_norm = 0.0;
  double relative_residual = 0.0;
  std::optional<double> convergence_order;
  std::optional<double> fitted_constant;
  std::map<std::string, std::string> metadata;

  // Thresholds attached by the caller; a report without them is observational.
  std::optional<double> tolerance;
  std::optional<double> min_order;
  std::optional<double> max_order;
  std::optional<double> max_fitted;  // passes only with fitted_constant <= max_fitted

  /// relative_residual = residual / max(reference, 1e-300).
  static CheckReport from_norms(std::string name, double residual, double reference);

  bool thresholded() const { return tolerance || min_order || max_order || max_fitted; }
  bool passed() const;

  nlohmann::json to_json() const;
  static CheckReport from_json(const nlohmann::json& j);
};

/// Observed order log2(coarse / fine) for a refinement by `ratio`.
double observed_order(double coarse, double fine, double ratio = 2.0);

/// Fills `fine.convergence_order` from a coarse companion report.
void attach_order(CheckReport& fine, const CheckReport& coarse, double ratio = 2.0);

}  // namespace cnls
