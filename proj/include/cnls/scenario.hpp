#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cnls/evolution.hpp"

namespace cnls {

/// One requested check: a registry identifier plus its parameters.
struct CheckSpec {
  std::string label;   // section name after "check ", unique per scenario
  std::string type;    // registry identifier
  std::map<std::string, std::string> params;

  bool has(const std::string& key) const { return params.count(key) > 0; }
  double number(const std::string& key, double fallback) const;
  std::optional<double> optional_number(const std::string& key) const;
  Vec3 vector(const std::string& key, Vec3 fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
};

/// Per-record diagnostics written to the CSV besides the conserved quantities.
struct DiagnosticsSpec {
  double radius = 0.0;           // 0: L / 8
  Vec3 center{0.0, 0.0, 0.0};    // of the V_a / M_a weight
  bool breakdown = false;        // interaction term breakdown columns
  std::vector<double> band_masses;  // N of ||P_{>=N} u||^2 columns
};

struct OutputSpec {
  int checkpoint_stride = 0;     // 0: none; k: every k-th record
  bool companion = false;        // also run dt * 2 for convergence orders
};

struct Scenario {
  std::string name;
  std::string description;
  std::string text;              // the text that was parsed; hashed into the manifest
  SimulationConfig config;
  DiagnosticsSpec diagnostics;
  OutputSpec output;
  std::vector<CheckSpec> checks;

  double diagnostic_radius() const;
};

/// Registry entry: identifier, one-line description, accepted parameters.
struct CheckType {
  std::string id;
  std::string description;
  std::vector<std::string> params;
};
const std::vector<CheckType>& check_registry();
const CheckType* find_check_type(const std::string& id);

/// Parses INI scenario text (grammar in docs/scenario_format.md). Throws
/// ParseError on malformed text, unknown sections, keys or check types.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Canonical INI text of a scenario; parse_scenario(to_ini(s)) reproduces s.
std::string to_ini(const Scenario& s);

/// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

}  // namespace cnls
