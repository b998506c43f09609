#include "freqstrat/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "freqstrat/grid_solver.hpp"
#include "json.hpp"

namespace freqstrat {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + ": " + what);
}

double get_num(const json& o, const char* key, double dflt, const std::string& prefix) {
  if (!o.contains(key)) return dflt;
  const json& v = o.at(key);
  if (!v.is_number()) bad(prefix + key, "expected a number");
  return v.get<double>();
}

int get_int(const json& o, const char* key, int dflt, const std::string& prefix) {
  if (!o.contains(key)) return dflt;
  const json& v = o.at(key);
  if (!v.is_number()) bad(prefix + key, "expected an integer");
  return int(v.get<double>());
}

bool get_bool(const json& o, const char* key, bool dflt, const std::string& prefix) {
  if (!o.contains(key)) return dflt;
  const json& v = o.at(key);
  if (!v.is_boolean()) bad(prefix + key, "expected a boolean");
  return v.get<bool>();
}

std::string get_str(const json& o, const char* key, const std::string& dflt,
                    const std::string& prefix) {
  if (!o.contains(key)) return dflt;
  const json& v = o.at(key);
  if (!v.is_string()) bad(prefix + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_nums(const json& o, const char* key, const std::string& prefix) {
  std::vector<double> out;
  if (!o.contains(key)) return out;
  const json& v = o.at(key);
  if (!v.is_array()) bad(prefix + key, "expected an array of numbers");
  for (const auto& e : v) {
    if (!e.is_number()) bad(prefix + key, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

const std::set<std::string> kExperiments = {
    "frequency-profile", "monotonicity-sweep", "rigidity",        "doubling",
    "singular-map",      "beta-sweep",         "cover-and-pack",  "minkowski"};

const std::set<std::string> kFieldNames = {"halfspace_poly", "tilted_halfspace_poly",
                                           "sum_of_polys", "perturbed_poly"};

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  ExperimentConfig cfg;
  cfg.raw_json = json_text;

  cfg.experiment = get_str(j, "experiment", "", "");
  if (!kExperiments.count(cfg.experiment))
    bad("experiment", "unknown experiment '" + cfg.experiment + "'");

  cfg.dim = get_int(j, "dim", 2, "");
  if (cfg.dim != 2 && cfg.dim != 3) bad("dim", "must be 2 or 3");

  cfg.R = get_num(j, "R", 0.25, "");
  if (!(cfg.R > 0.0)) bad("R", "must be positive");

  if (j.contains("phi")) {
    const json& p = j.at("phi");
    if (!p.is_object()) bad("phi", "expected an object");
    cfg.phi_family = get_str(p, "family", "flat", "phi.");
    cfg.phi_params = get_nums(p, "params", "phi.");
  }
  if (cfg.phi_family != "flat" && cfg.phi_family != "power")
    bad("phi.family", "unknown family '" + cfg.phi_family + "'");
  if (cfg.phi_family == "power" && cfg.phi_params.size() != 2)
    bad("phi.params", "power family needs {c, p}");

  if (j.contains("theta")) {
    const json& t = j.at("theta");
    if (!t.is_object()) bad("theta", "expected an object");
    cfg.theta_family = get_str(t, "family", "zero", "theta.");
    cfg.theta_params = get_nums(t, "params", "theta.");
  }
  if (cfg.theta_family == "power") {
    if (cfg.theta_params.size() != 2) bad("theta.params", "power family needs {c, a}");
  } else if (cfg.theta_family == "log") {
    if (cfg.theta_params.size() != 1) bad("theta.params", "log family needs {c}");
  } else if (cfg.theta_family != "zero") {
    bad("theta.family", "unknown family '" + cfg.theta_family + "'");
  }

  cfg.relax_scale_checks = get_bool(j, "relax_scale_checks", false, "");

  if (j.contains("field")) {
    const json& f = j.at("field");
    if (!f.is_object()) bad("field", "expected an object");
    cfg.field_kind = get_str(f, "kind", "closed", "field.");
    cfg.field_name = get_str(f, "name", "halfspace_poly", "field.");
    cfg.field_params = get_nums(f, "params", "field.");
  }
  if (cfg.field_kind != "closed" && cfg.field_kind != "grid")
    bad("field.kind", "unknown kind '" + cfg.field_kind + "'");
  if (!kFieldNames.count(cfg.field_name))
    bad("field.name", "unknown model field '" + cfg.field_name + "'");

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (!g.is_object()) bad("grid", "expected an object");
    cfg.grid_resolution = get_int(g, "resolution", cfg.grid_resolution, "grid.");
    cfg.grid_box_half_width = get_num(g, "box_half_width", cfg.grid_box_half_width, "grid.");
    cfg.grid_box_height = get_num(g, "box_height", cfg.grid_box_height, "grid.");
  }

  cfg.radii = get_nums(j, "radii", "");
  for (double r : cfg.radii)
    if (!(r > 0.0)) bad("radii", "radii must be positive");

  if (j.contains("centers")) {
    const json& c = j.at("centers");
    if (!c.is_array()) bad("centers", "expected an array of coordinate arrays");
    for (const auto& e : c) {
      if (!e.is_array() || int(e.size()) != cfg.dim)
        bad("centers", "each center needs exactly dim coordinates");
      std::vector<double> pt;
      for (const auto& x : e) {
        if (!x.is_number()) bad("centers", "coordinates must be numbers");
        pt.push_back(x.get<double>());
      }
      cfg.centers.push_back(pt);
    }
  }

  cfg.r0 = get_num(j, "r0", 0.0, "");
  cfg.r_star = get_num(j, "r_star", 0.0, "");
  cfg.mc_probes = std::uint64_t(get_num(j, "mc_probes", double(cfg.mc_probes), ""));
  cfg.mink_r = get_num(j, "mink_r", cfg.mink_r, "");
  cfg.sample_count = get_int(j, "sample_count", cfg.sample_count, "");
  cfg.sample_spacing = get_num(j, "sample_spacing", 0.0, "");

  cfg.light_quad = get_bool(j, "light_quad", false, "");
  cfg.quad = cfg.light_quad ? QuadSpec::light(cfg.dim) : QuadSpec::dflt(cfg.dim);
  if (j.contains("quad")) {
    const json& q = j.at("quad");
    if (!q.is_object()) bad("quad", "expected an object");
    cfg.quad.radial = get_int(q, "radial", cfg.quad.radial, "quad.");
    cfg.quad.polar = get_int(q, "polar", cfg.quad.polar, "quad.");
    cfg.quad.azimuth = get_int(q, "azimuth", cfg.quad.azimuth, "quad.");
    cfg.quad.ray_scan = get_int(q, "ray_scan", cfg.quad.ray_scan, "quad.");
    cfg.quad.tol = get_num(q, "tol", cfg.quad.tol, "quad.");
  }

  if (j.contains("ledger")) {
    const json& l = j.at("ledger");
    if (!l.is_object()) bad("ledger", "expected an object");
    ConstantLedger& led = cfg.ledger;
    led.C = get_num(l, "C", led.C, "ledger.");
    led.rho = get_num(l, "rho", led.rho, "ledger.");
    led.tau = get_num(l, "tau", led.tau, "ledger.");
    led.delta = get_num(l, "delta", led.delta, "ledger.");
    led.delta_in = get_num(l, "delta_in", led.delta_in, "ledger.");
    led.delta0 = get_num(l, "delta0", led.delta0, "ledger.");
    led.alpha0 = get_num(l, "alpha0", led.alpha0, "ledger.");
    led.beta = get_num(l, "beta", led.beta, "ledger.");
    led.eta_dr = get_num(l, "eta_dr", led.eta_dr, "ledger.");
    led.C_dr = get_num(l, "C_dr", led.C_dr, "ledger.");
    led.Cp_d = get_num(l, "Cp_d", led.Cp_d, "ledger.");
    led.r_c = get_num(l, "r_c", led.r_c, "ledger.");
    led.r_in = get_num(l, "r_in", led.r_in, "ledger.");
    led.r_b = get_num(l, "r_b", led.r_b, "ledger.");
    led.r_tn = get_num(l, "r_tn", led.r_tn, "ledger.");
    led.round_cap = get_int(l, "round_cap", led.round_cap, "ledger.");
  }
  try {
    cfg.ledger.validate();
  } catch (const std::exception& e) {
    bad("ledger", e.what());
  }

  cfg.out_dir = get_str(j, "out_dir", cfg.out_dir, "");
  cfg.seed = std::uint64_t(get_num(j, "seed", double(cfg.seed), ""));
  cfg.threads = get_int(j, "threads", cfg.threads, "");
  if (cfg.threads < 1) bad("threads", "must be at least 1");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw ConfigError("config: cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

DiniModulus make_modulus(const ExperimentConfig& cfg) {
  if (cfg.theta_family == "zero") return DiniModulus::zero();
  if (cfg.theta_family == "power")
    return DiniModulus::power(cfg.theta_params[0], cfg.theta_params[1]);
  return DiniModulus::log_type(cfg.theta_params[0]);
}

GraphDomain make_domain(const ExperimentConfig& cfg) {
  const bool power = cfg.phi_family == "power";
  try {
    return GraphDomain(cfg.dim, cfg.R,
                       power ? GraphDomain::PhiFamily::Power : GraphDomain::PhiFamily::Flat,
                       power ? cfg.phi_params[0] : 0.0, power ? cfg.phi_params[1] : 2.0,
                       make_modulus(cfg), cfg.relax_scale_checks);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: domain: ") + e.what());
  }
}

FieldPtr make_field(const ExperimentConfig& cfg, const GraphDomain& domain) {
  FieldPtr base;
  try {
    base = make_model_field(cfg.dim, cfg.field_name, cfg.field_params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: field: ") + e.what());
  }
  if (cfg.field_kind == "closed") return base;
  return solve_dirichlet(domain, base, cfg.grid_resolution, cfg.grid_box_half_width,
                         cfg.grid_box_height);
}

}  // namespace freqstrat
