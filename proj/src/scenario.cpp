#include "cnls/scenario.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

#include "cnls/cutoff.hpp"
#include "cnls/error.hpp"
#include "cnls/format.hpp"

namespace cnls {
namespace {

using boost::property_tree::ptree;

double parse_number(const std::string& value, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || value.find_first_not_of(" \t", used) != std::string::npos) {
    throw ParseError(fmt::format("{}: '{}' is not a number", where, value));
  }
  return v;
}

bool parse_bool(const std::string& value, const std::string& where) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParseError(fmt::format("{}: '{}' is not a boolean", where, value));
}

std::vector<double> parse_list(const std::string& value, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    out.push_back(parse_number(item.substr(a), where));
  }
  return out;
}

Vec3 parse_vec3(const std::string& value, const std::string& where) {
  const std::vector<double> v = parse_list(value, where);
  if (v.size() != 3) throw ParseError(fmt::format("{}: expected three comma-separated numbers", where));
  return {v[0], v[1], v[2]};
}

void require_keys(const ptree& section, const std::string& name,
                  const std::set<std::string>& allowed) {
  for (const auto& [key, child] : section) {
    if (!child.empty()) throw ParseError(fmt::format("[{}]: nested key '{}'", name, key));
    if (!allowed.count(key)) throw ParseError(fmt::format("[{}]: unknown key '{}'", name, key));
  }
}

const std::set<std::string> kInitialKeys = {
    "generator", "seed",     "amplitude", "width", "center_x", "center_y", "center_z", "k_x",
    "k_y",       "k_z",      "chirp",     "separation", "k",   "band",     "spikes",   "l2"};

const std::set<std::string> kGenerators = {"gaussian",   "modulated_gaussian", "two_bump",
                                           "band_limited_random", "plane_wave", "constant"};

const std::vector<std::string> kCommon = {"type", "tolerance", "min_order", "max_order"};

std::vector<std::string> with_common(std::vector<std::string> extra) {
  extra.insert(extra.begin(), kCommon.begin(), kCommon.end());
  return extra;
}

Coupling parse_mu(const std::string& v, const std::string& where) {
  if (v == "defocusing" || v == "1" || v == "+1") return Coupling::Defocusing;
  if (v == "focusing" || v == "-1") return Coupling::Focusing;
  if (v == "free" || v == "0") return Coupling::Free;
  throw ParseError(fmt::format("{}: mu must be defocusing, focusing or free", where));
}

std::string mu_text(Coupling mu) {
  switch (mu) {
    case Coupling::Defocusing: return "defocusing";
    case Coupling::Focusing: return "focusing";
    case Coupling::Free: return "free";
  }
  return "defocusing";
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt_double(v[i]);
  return out;
}

}  // namespace

double CheckSpec::number(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : parse_number(it->second, "check " + label + "." + key);
}

std::optional<double> CheckSpec::optional_number(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return number(key, 0.0);
}

Vec3 CheckSpec::vector(const std::string& key, Vec3 fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : parse_vec3(it->second, "check " + label + "." + key);
}

std::string CheckSpec::text(const std::string& key, const std::string& fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double Scenario::diagnostic_radius() const {
  return diagnostics.radius > 0.0 ? diagnostics.radius : config.box_length / 8.0;
}

const std::vector<CheckType>& check_registry() {
  static const std::vector<CheckType> registry = {
      {"mass_drift", "max_t |M(t) - M(0)| / M(0)", with_common({})},
      {"momentum_drift", "max_t |P(t) - P(0)|, absolute", with_common({})},
      {"energy_drift", "max_t |E(t) - E(0)| / |E(0)|; order from the companion run",
       with_common({})},
      {"bracket_cancellation", "{N,u}_m = 0 pointwise and {N,u}_p = -(2/3) grad |u|^6",
       with_common({"mass_tolerance", "momentum_tolerance"})},
      {"local_mass", "d_t T00 + d_j T0j = 2 {N,u}_m", with_common({})},
      {"local_momentum", "d_t T0j + d_k Tjk = 0", with_common({})},
      {"local_energy", "local energy conservation law", with_common({})},
      {"frequency_localized_mass", "dL/dt = 2 int {P_hi N, u_hi}_m, L = ||P_{>=N} u||^2",
       with_common({"n_cut", "constancy_tolerance"})},
      {"virial", "d_t M_a = int (-ΔΔa)|u|^2 + 4 int a_jk Re(u_j u_k) + 2 int a_j {N,u}_p",
       with_common({"radius", "center", "weight", "mode"})},
      {"vdot", "d_t V_a = M_a + 2 int a {N,u}_m", with_common({"radius", "center", "weight", "mode"})},
      {"interaction_derivative", "exact decomposition of d_t M^interact",
       with_common({"radius"})},
      {"interaction_bound", "max_t |M^interact| / (||u||_2^3 ||u||_H1)", with_common({"radius"})},
      {"interaction_inequality", "int int |u|^4 / (||u0||_2^2 sup ||u||_{H^1/2}^2)",
       with_common({"max_ratio"})},
      {"frequency_localized_quartic", "int int |P_{>=N*} u|^4 and its N*^3 multiple",
       with_common({"n_star"})},
      {"pseudoconformal", "pseudoconformal conservation law",
       with_common({"support_tolerance"})},
      {"spacetime_norm", "L^q_t L^r_x norm of grad^k P u", with_common({"q", "r", "k", "band"})},
      {"strichartz", "S^k norm over the six listed admissible pairs", with_common({"k"})},
      {"scattering", "relative H1 distance to the free profile over the last quarter",
       with_common({"smallness"})},
  };
  return registry;
}

const CheckType* find_check_type(const std::string& id) {
  for (const auto& c : check_registry()) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

Scenario parse_scenario(const std::string& text) {
  ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(fmt::format("scenario line {}: {}", e.line(), e.message()));
  }

  // read_ini drops sections without keys, so "[check mass_drift]" alone
  // would vanish; put them back in file order.
  std::vector<std::string> order;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const auto a = line.find_first_not_of(" \t");
      const auto b = line.find_last_not_of(" \t\r");
      if (a != std::string::npos && line[a] == '[' && line[b] == ']') {
        order.push_back(line.substr(a + 1, b - a - 1));
      }
    }
  }
  for (const auto& [key, child] : tree) {
    if (!child.data().empty()) throw ParseError(fmt::format("key '{}' outside a section", key));
  }
  const ptree empty;
  Scenario s;
  s.text = text;
  for (const std::string& section : order) {
    const auto found = tree.find(section);
    const ptree& body = found == tree.not_found() ? empty : found->second;
    auto get = [&](const std::string& key) { return body.get<std::string>(key); };
    const std::string where = "[" + section + "]";
    if (section == "scenario") {
      require_keys(body, section, {"name", "description"});
      s.name = body.get<std::string>("name", "");
      s.description = body.get<std::string>("description", "");
    } else if (section == "grid") {
      require_keys(body, section, {"n", "box_length"});
      if (body.count("n")) {
        const double n = parse_number(get("n"), where + " n");
        if (n != static_cast<int>(n)) throw ParseError(where + " n must be an integer");
        s.config.n = static_cast<int>(n);
      }
      if (body.count("box_length")) s.config.box_length = parse_number(get("box_length"), where);
    } else if (section == "initial") {
      require_keys(body, section, kInitialKeys);
      for (const auto& [key, child] : body) {
        const std::string v = child.data();
        if (key == "generator") {
          if (!kGenerators.count(v)) {
            throw ParseError(fmt::format("{}: unknown generator '{}'", where, v));
          }
          s.config.initial.generator = v;
        } else if (key == "seed") {
          try {
            s.config.initial.seed = std::stoull(v);
          } catch (const std::exception&) {
            throw ParseError(fmt::format("{}: seed '{}' is not an unsigned integer", where, v));
          }
        } else {
          s.config.initial.params[key] = parse_number(v, where + " " + key);
        }
      }
    } else if (section == "evolution") {
      require_keys(body, section, {"mu", "dt", "t_end", "record_stride", "companion"});
      if (body.count("mu")) s.config.mu = parse_mu(get("mu"), where);
      if (body.count("dt")) s.config.dt = parse_number(get("dt"), where + " dt");
      if (body.count("t_end")) s.config.t_end = parse_number(get("t_end"), where + " t_end");
      if (body.count("record_stride")) {
        s.config.record_stride =
            static_cast<int>(parse_number(get("record_stride"), where + " record_stride"));
      }
      if (body.count("companion")) s.output.companion = parse_bool(get("companion"), where);
    } else if (section == "output") {
      require_keys(body, section, {"checkpoint_stride"});
      if (body.count("checkpoint_stride")) {
        s.output.checkpoint_stride =
            static_cast<int>(parse_number(get("checkpoint_stride"), where));
        if (s.output.checkpoint_stride < 0) throw ParseError(where + " checkpoint_stride < 0");
      }
    } else if (section == "diagnostics") {
      require_keys(body, section, {"radius", "center", "breakdown", "band_masses"});
      if (body.count("radius")) s.diagnostics.radius = parse_number(get("radius"), where);
      if (body.count("center")) s.diagnostics.center = parse_vec3(get("center"), where);
      if (body.count("breakdown")) s.diagnostics.breakdown = parse_bool(get("breakdown"), where);
      if (body.count("band_masses")) {
        s.diagnostics.band_masses = parse_list(get("band_masses"), where);
        for (double b : s.diagnostics.band_masses) {
          if (!is_dyadic(b)) {
            throw ParseError(fmt::format("{}: band {} is not dyadic", where, b));
          }
        }
      }
    } else if (section.rfind("check ", 0) == 0) {
      CheckSpec c;
      c.label = section.substr(6);
      if (c.label.empty()) throw ParseError("check section without a label");
      for (const auto& [key, child] : body) c.params[key] = child.data();
      c.type = c.text("type", c.label);
      const CheckType* type = find_check_type(c.type);
      if (!type) throw ParseError(fmt::format("{}: unknown check '{}'", where, c.type));
      const std::set<std::string> allowed(type->params.begin(), type->params.end());
      require_keys(body, section, allowed);
      for (const char* key : {"tolerance", "min_order", "max_order"}) c.optional_number(key);
      s.checks.push_back(std::move(c));
    } else {
      throw ParseError(fmt::format("unknown section [{}]", section));
    }
  }
  if (s.name.empty()) throw ParseError("[scenario] name is required");
  for (const auto& c : s.checks) {
    if ((c.has("min_order") || c.has("max_order")) && !s.output.companion) {
      throw ParseError(fmt::format("check {} asks for an order but [evolution] companion is off",
                                   c.label));
    }
  }
  try {
    (void)s.config.grid();
  } catch (const ContractViolation& e) {
    throw ParseError(e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string to_ini(const Scenario& s) {
  std::string out;
  out += fmt::format("[scenario]\nname = {}\n", s.name);
  if (!s.description.empty()) out += fmt::format("description = {}\n", s.description);
  out += fmt::format("\n[grid]\nn = {}\nbox_length = {}\n", s.config.n,
                     fmt_double(s.config.box_length));
  out += fmt::format("\n[initial]\ngenerator = {}\nseed = {}\n", s.config.initial.generator,
                     s.config.initial.seed);
  for (const auto& [k, v] : s.config.initial.params) out += fmt::format("{} = {}\n", k, fmt_double(v));
  out += fmt::format("\n[evolution]\nmu = {}\ndt = {}\nt_end = {}\nrecord_stride = {}\ncompanion = {}\n",
                     mu_text(s.config.mu), fmt_double(s.config.dt), fmt_double(s.config.t_end),
                     s.config.record_stride, s.output.companion ? "true" : "false");
  out += fmt::format("\n[output]\ncheckpoint_stride = {}\n", s.output.checkpoint_stride);
  const auto& d = s.diagnostics;
  out += fmt::format("\n[diagnostics]\nradius = {}\ncenter = {},{},{}\nbreakdown = {}\n",
                     fmt_double(d.radius), fmt_double(d.center[0]), fmt_double(d.center[1]),
                     fmt_double(d.center[2]), d.breakdown ? "true" : "false");
  if (!d.band_masses.empty()) out += fmt::format("band_masses = {}\n", join(d.band_masses));
  for (const auto& c : s.checks) {
    out += fmt::format("\n[check {}]\n", c.label);
    if (c.type != c.label && !c.has("type")) out += fmt::format("type = {}\n", c.type);
    for (const auto& [k, v] : c.params) out += fmt::format("{} = {}\n", k, v);
  }
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

}  // namespace cnls
