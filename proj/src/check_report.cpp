#include "cnls/check_report.hpp"

#include <algorithm>
#include <cmath>

#include "cnls/format.hpp"

namespace cnls {

CheckReport CheckReport::from_norms(std::string name, double residual, double reference) {
  CheckReport r;
  r.name = std::move(name);
  r.residual_norm = residual;
  r.reference_norm = reference;
  r.relative_residual = residual / std::max(reference, 1e-300);
  return r;
}

bool CheckReport::passed() const {
  if (!std::isfinite(relative_residual)) return false;
  if (tolerance && !(relative_residual < *tolerance)) return false;
  if (min_order && !(convergence_order && *convergence_order >= *min_order)) return false;
  if (max_order && !(convergence_order && *convergence_order <= *max_order)) return false;
  if (max_fitted && !(fitted_constant && *fitted_constant <= *max_fitted)) return false;
  return true;
}

namespace {
nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
std::optional<double> read_optional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}
}  // namespace

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["relative_residual"] = relative_residual;
  j["convergence_order"] = optional_number(convergence_order);
  j["fitted_constant"] = optional_number(fitted_constant);
  j["metadata"] = metadata;
  j["residual_norm"] = residual_norm;
  j["reference_norm"] = reference_norm;
  j["tolerance"] = optional_number(tolerance);
  j["min_order"] = optional_number(min_order);
  j["max_order"] = optional_number(max_order);
  j["max_fitted"] = optional_number(max_fitted);
  j["passed"] = passed();
  return j;
}

CheckReport CheckReport::from_json(const nlohmann::json& j) {
  CheckReport r;
  r.name = j.at("name").get<std::string>();
  r.relative_residual = j.at("relative_residual").get<double>();
  r.convergence_order = read_optional(j, "convergence_order");
  r.fitted_constant = read_optional(j, "fitted_constant");
  if (j.contains("metadata")) {
    r.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  }
  r.residual_norm = j.value("residual_norm", 0.0);
  r.reference_norm = j.value("reference_norm", 0.0);
  r.tolerance = read_optional(j, "tolerance");
  r.min_order = read_optional(j, "min_order");
  r.max_order = read_optional(j, "max_order");
  r.max_fitted = read_optional(j, "max_fitted");
  return r;
}

double observed_order(double coarse, double fine, double ratio) {
  return std::log(coarse / fine) / std::log(ratio);
}

void attach_order(CheckReport& fine, const CheckReport& coarse, double ratio) {
  fine.convergence_order = observed_order(coarse.relative_residual, fine.relative_residual, ratio);
  fine.metadata["coarse_relative_residual"] = fmt_double(coarse.relative_residual);
}

}  // namespace cnls
