#include "config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <set>

#include "error.hpp"
#include "micro_solver.hpp"

namespace porohom {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& section, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError("section '" + section + "' must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "' in section '" + section + "'");
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& section) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + std::string(key) + "' in section '" + section +
                      "' has the wrong type");
  }
}

int get_int(const json& obj, const char* key, int fallback, const std::string& section) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw ConfigError("key '" + std::string(key) + "' in section '" + section +
                      "' must be an integer");
  return v.get<int>();
}

Point get_point(const json& obj, const char* key, Point fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() > 3) throw ConfigError(std::string(key) + " must be an array");
  Point p = fallback;
  for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[i].get<double>();
  return p;
}

Expression get_expression(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return Expression::parse(fallback);
  const json& v = obj.at(key);
  if (v.is_number()) return Expression::parse(v.dump());
  if (!v.is_string()) throw ConfigError(std::string(key) + " must be an expression string");
  return Expression::parse(v.get<std::string>());
}

InclusionShape parse_inclusion(const json& j) {
  check_keys(j, "geometry.inclusion", {"kind", "center", "radius", "half_width", "semi_axes", "exponent"});
  InclusionShape s;
  s.kind = inclusion_kind_from_string(get_or<std::string>(j, "kind", "none", "geometry.inclusion"));
  s.center = get_point(j, "center", {0.5, 0.5, 0.5});
  switch (s.kind) {
    case InclusionShape::Kind::none: break;
    case InclusionShape::Kind::disk:
      s.radius = get_or<double>(j, "radius", 0.0, "geometry.inclusion");
      break;
    case InclusionShape::Kind::square:
      s.radius = get_or<double>(j, "half_width", 0.0, "geometry.inclusion");
      break;
    case InclusionShape::Kind::super_ellipse:
      s.semi_axes = get_point(j, "semi_axes", {0.0, 0.0, 0.0});
      s.exponent = get_or<double>(j, "exponent", 4.0, "geometry.inclusion");
      if (!(s.exponent > 0.0)) throw ConfigError("super_ellipse exponent must be positive");
      break;
  }
  return s;
}

}  // namespace

const char* to_string(MacroMode mode) {
  switch (mode) {
    case MacroMode::automatic: return "auto";
    case MacroMode::coupled: return "coupled";
    case MacroMode::decoupled: return "decoupled";
  }
  return "auto";
}

MacroMode RunConfig::macro_mode() const {
  if (solver.macro_mode != MacroMode::automatic) return solver.macro_mode;
  return scaling.alpha == scaling.beta ? MacroMode::coupled : MacroMode::decoupled;
}

RunConfig parse_and_validate(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc, "<root>", {"geometry", "scaling", "species", "surface_charge", "solver",
                             "output", "study"});
  RunConfig cfg;

  const json geo = doc.value("geometry", json::object());
  check_keys(geo, "geometry", {"dimension", "inclusion", "m", "r"});
  cfg.geometry.dimension = get_int(geo, "dimension", 2, "geometry");
  if (cfg.geometry.dimension != 2 && cfg.geometry.dimension != 3)
    throw ConfigError("geometry.dimension must be 2 or 3");
  cfg.geometry.inclusion = parse_inclusion(geo.value("inclusion", json::object()));
  cfg.geometry.m = get_int(geo, "m", 1, "geometry");
  cfg.geometry.r = get_int(geo, "r", 8, "geometry");
  if (cfg.geometry.m < 1) throw ConfigError("geometry.m must be >= 1 (epsilon = 1/m)");
  if (cfg.geometry.r < 4) throw ConfigError("geometry.r must be >= 4");

  const json sc = doc.value("scaling", json::object());
  check_keys(sc, "scaling", {"alpha", "beta", "eta", "p", "T", "dt", "output_interval",
                             "cfl_safety", "dt_min"});
  ScalingConfig& s = cfg.scaling;
  s.alpha = get_or<double>(sc, "alpha", 0.0, "scaling");
  s.beta = get_or<double>(sc, "beta", 0.0, "scaling");
  s.eta = get_or<double>(sc, "eta", 1.0, "scaling");
  s.p = get_or<double>(sc, "p", 4.0, "scaling");
  s.final_time = get_or<double>(sc, "T", 0.0, "scaling");
  s.dt = get_or<double>(sc, "dt", 1e-3, "scaling");
  s.output_interval = get_or<double>(sc, "output_interval", 0.0, "scaling");
  s.cfl_safety = get_or<double>(sc, "cfl_safety", 0.4, "scaling");
  s.dt_min = get_or<double>(sc, "dt_min", 1e-10, "scaling");
  if (s.alpha > s.beta)
    throw ConfigError("scaling violates alpha <= beta (alpha=" + std::to_string(s.alpha) +
                      ", beta=" + std::to_string(s.beta) + ")");
  if (!(s.eta > 0.0)) throw ConfigError("scaling.eta must be > 0 (h_p requires eta in (0, inf))");
  if (!(s.p >= 4.0)) throw ConfigError("scaling.p must be >= 4 (h_p requires p in [4, inf))");
  if (!(s.final_time >= 0.0)) throw ConfigError("scaling.T must be >= 0");
  if (!(s.dt > 0.0)) throw ConfigError("scaling.dt must be > 0");
  if (!(s.cfl_safety > 0.0)) throw ConfigError("scaling.cfl_safety must be > 0");
  if (!(s.dt_min > 0.0)) throw ConfigError("scaling.dt_min must be > 0");

  if (!doc.contains("species") || !doc["species"].is_array() || doc["species"].empty())
    throw ConfigError("species must be a non-empty array");
  for (const json& sp : doc["species"]) {
    check_keys(sp, "species", {"D", "z", "c0"});
    SpeciesConfig spec;
    spec.diffusivity = get_or<double>(sp, "D", 1.0, "species");
    spec.charge = get_int(sp, "z", 0, "species");
    spec.initial = get_expression(sp, "c0", "1");
    if (!(spec.diffusivity > 0.0)) throw ConfigError("species D must be > 0: diffusivities must be positive");
    if (spec.initial.depends_on_y() || spec.initial.depends_on_t())
      throw ConfigError("initial concentration may depend on x only");
    cfg.species.push_back(std::move(spec));
  }

  const json sq = doc.value("surface_charge", json::object());
  check_keys(sq, "surface_charge", {"xi1", "xi2", "auto_balance"});
  cfg.surface.xi1 = get_expression(sq, "xi1", "0");
  cfg.surface.xi2 = get_expression(sq, "xi2", "0");
  cfg.surface.auto_balance = get_or<bool>(sq, "auto_balance", false, "surface_charge");
  if (cfg.surface.xi2.depends_on_y()) throw ConfigError("xi2 may depend on x only");

  const json so = doc.value("solver", json::object());
  check_keys(so, "solver", {"linear_tol", "poisson_tol", "cell_tol", "max_iterations",
                            "poisson_every_step", "explicit_time", "macro_mode",
                            "macro_resolution"});
  SolverConfig& sv = cfg.solver;
  sv.linear_tolerance = get_or<double>(so, "linear_tol", sv.linear_tolerance, "solver");
  sv.poisson_tolerance = get_or<double>(so, "poisson_tol", sv.poisson_tolerance, "solver");
  sv.cell_tolerance = get_or<double>(so, "cell_tol", sv.cell_tolerance, "solver");
  sv.max_iterations = get_int(so, "max_iterations", sv.max_iterations, "solver");
  sv.poisson_every_step = get_or<bool>(so, "poisson_every_step", false, "solver");
  sv.explicit_time = get_or<bool>(so, "explicit_time", false, "solver");
  const std::string mode = get_or<std::string>(so, "macro_mode", "auto", "solver");
  if (mode == "auto") sv.macro_mode = MacroMode::automatic;
  else if (mode == "coupled") sv.macro_mode = MacroMode::coupled;
  else if (mode == "decoupled") sv.macro_mode = MacroMode::decoupled;
  else throw ConfigError("solver.macro_mode must be auto, coupled or decoupled");
  sv.macro_resolution = get_int(so, "macro_resolution", 0, "solver");
  if (sv.macro_resolution != 0 && sv.macro_resolution < 4)
    throw ConfigError("solver.macro_resolution must be >= 4");
  if (!(sv.linear_tolerance > 0.0 && sv.poisson_tolerance > 0.0 && sv.cell_tolerance > 0.0))
    throw ConfigError("solver tolerances must be > 0");
  if (sv.max_iterations < 1) throw ConfigError("solver.max_iterations must be >= 1");
  if (sv.macro_mode == MacroMode::coupled && s.alpha != s.beta)
    throw ConfigError("macro_mode coupled requires alpha == beta");
  if (sv.macro_mode == MacroMode::decoupled && !(s.alpha < s.beta))
    throw ConfigError("macro_mode decoupled requires alpha < beta");

  const json out = doc.value("output", json::object());
  check_keys(out, "output", {"snapshot_every", "correctors"});
  cfg.output.snapshot_every = get_int(out, "snapshot_every", 0, "output");
  cfg.output.write_correctors = get_or<bool>(out, "correctors", false, "output");
  if (cfg.output.snapshot_every < 0) throw ConfigError("output.snapshot_every must be >= 0");

  const json st = doc.value("study", json::object());
  check_keys(st, "study", {"m_list", "mms_resolutions", "eta_list"});
  cfg.study.m_list = get_or<std::vector<int>>(st, "m_list", {}, "study");
  cfg.study.mms_resolutions =
      get_or<std::vector<int>>(st, "mms_resolutions", cfg.study.mms_resolutions, "study");
  cfg.study.eta_list = get_or<std::vector<double>>(st, "eta_list", {}, "study");
  for (std::size_t k = 0; k < cfg.study.m_list.size(); ++k) {
    if (cfg.study.m_list[k] < 1) throw ConfigError("study.m_list entries must be >= 1");
    if (k > 0 && cfg.study.m_list[k] <= cfg.study.m_list[k - 1])
      throw ConfigError("study.m_list must be strictly increasing (epsilon strictly decreasing)");
  }
  for (std::size_t k = 0; k < cfg.study.eta_list.size(); ++k) {
    if (!(cfg.study.eta_list[k] > 0.0)) throw ConfigError("study.eta_list entries must be > 0");
    if (k > 0 && cfg.study.eta_list[k] > cfg.study.eta_list[k - 1])
      throw ConfigError("study.eta_list must be non-increasing");
  }
  for (int n : cfg.study.mms_resolutions)
    if (n < 4) throw ConfigError("study.mms_resolutions entries must be >= 4");

  // Geometry and charge compatibility are checked on the configured grid.
  try {
    const MicroSetup setup = build_micro_model(cfg);
    cfg.surface.xi2_shift = setup.compatibility.xi2_shift;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("geometry rejected: ") + e.what());
  }

  cfg.document = doc;
  return cfg;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string config_hash(const RunConfig& config) { return sha256_hex(config.document.dump()); }

std::string physics_hash(const RunConfig& config) {
  json phys;
  phys["species"] = config.document.value("species", json::array());
  phys["surface_charge"] = config.document.value("surface_charge", json::object());
  const json sc = config.document.value("scaling", json::object());
  for (const char* key : {"alpha", "beta", "eta", "p", "T"})
    if (sc.contains(key)) phys[key] = sc[key];
  phys["inclusion"] = config.document.value("geometry", json::object()).value("inclusion", json::object());
  return sha256_hex(phys.dump());
}

}  // namespace porohom
