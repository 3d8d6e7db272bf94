#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace tbgcli {

namespace {

constexpr double alpha1 = 0.5856635583895583;

json cplx_json(double re, double im) { return json::array({re, im}); }

json base_config() {
  return {{"model", {{"m", 0.0}, {"alpha", cplx_json(alpha1, 0.0)}, {"potential", "default"}}},
          {"numerics", {{"cutoff", 12.0}, {"kgrid", 8}, {"L_list", json::array({6})}}},
          {"disorder", nullptr},
          {"task", json::object()},
          {"seed", 1},
          {"output_dir", "out"}};
}

json disorder_defaults(double lambda) {
  return {{"lambda", lambda},         {"kind", "case2"},         {"bump_radius", 3.2},
          {"relax_radius", 0.3},      {"density_scale", 1.0},    {"case1_ratio", 0.3},
          {"case1_phase", 0.0}};
}

bool is_complex_slot(const std::string& where) { return where == "/model/alpha" || where == "/task/k"; }

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ConfigError((where.empty() ? std::string("config") : where) + ": " + msg);
}

json normalize_complex(const json& v, const std::string& where) {
  if (v.is_number()) return cplx_json(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 1 && v[0].is_number()) return cplx_json(v[0].get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return cplx_json(v[0].get<double>(), v[1].get<double>());
  fail(where, "expected a number or [re, im]");
}

void check_potential(const json& v, const std::string& where) {
  if (v.is_string()) {
    if (v.get<std::string>() != "default") fail(where, "unknown potential '" + v.get<std::string>() + "'");
    return;
  }
  if (!v.is_object()) fail(where, "expected \"default\" or an object with modes");
  for (const auto& [k, _] : v.items())
    if (k != "label" && k != "modes") fail(where + "/" + k, "unknown key");
  if (!v.contains("modes") || !v["modes"].is_array() || v["modes"].empty()) fail(where, "modes must be a nonempty array");
  for (const auto& m : v["modes"]) {
    if (!m.is_object()) fail(where + "/modes", "each mode is an object");
    for (const auto& [k, _] : m.items())
      if (k != "momentum" && k != "coeff") fail(where + "/modes/" + k, "unknown key");
    normalize_complex(m.at("momentum"), where + "/modes/momentum");
    normalize_complex(m.at("coeff"), where + "/modes/coeff");
  }
}

const json& at(const json& cfg, const std::string& pointer) {
  try {
    return cfg.at(json::json_pointer(pointer));
  } catch (const json::exception&) {
    fail(pointer, "missing");
  }
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"magic",           "bands",         "traces",     "det4",
                                          "stability-bound", "pseudospec",    "instability", "perturb-scatter",
                                          "disorder-ids",    "wegner",        "chern",      "transport",
                                          "wannier-moment"};
  return s;
}

json default_config(const std::string& sub) {
  json c = base_config();
  auto& t = c["task"];
  auto& n = c["numerics"];
  if (sub == "magic") {
    t = {{"alpha_max", 1.0}, {"k", cplx_json(0.0, -0.5)}};
  } else if (sub == "bands") {
    n["cutoff"] = 8.0;
    t = {{"n_per_segment", 24}, {"bands", 8}, {"gap", true}};
  } else if (sub == "traces") {
    n["cutoff"] = 16.0;
    t = {{"pmax", 8}, {"k", cplx_json(0.0, -0.5)}};
  } else if (sub == "det4") {
    n["cutoff"] = 8.0;
    t = {{"n_terms", 48}, {"n_points", 50}, {"radius", 1.0}, {"k", cplx_json(0.0, -0.5)}};
  } else if (sub == "stability-bound") {
    t = {{"alpha_min", 0.05}, {"alpha_max", 3.0}, {"alpha_imag", 0.0}, {"n", 300}, {"k", cplx_json(0.0, -0.5)}};
  } else if (sub == "pseudospec") {
    n["cutoff"] = 8.0;
    t = {{"re_min", -2.0}, {"re_max", 2.0}, {"im_min", -2.0}, {"im_max", 2.0},
         {"nx", 81},       {"ny", 81},       {"k", cplx_json(0.0, -0.5)}};
  } else if (sub == "instability") {
    t = {{"alpha_min", 0.8}, {"alpha_max", 4.0}, {"n", 161}, {"k", cplx_json(0.0, -0.5)}};
  } else if (sub == "perturb-scatter") {
    n["cutoff"] = 8.0;
    t = {{"lambdas", json::array({0.01, 0.1})},
         {"n_samples", 200},
         {"shells", 2},
         {"sup_grid", 64},
         {"diagonal", true},
         {"alpha_max", 4.0},
         {"k", cplx_json(0.0, -0.5)}};
  } else if (sub == "disorder-ids") {
    c["model"]["m"] = 0.2;
    n["cutoff"] = 3.0;
    n["L_list"] = json::array({4});
    c["disorder"] = disorder_defaults(0.1);
    t = {{"n_real", 50}, {"bins", 200}, {"intervals", json::array({0.1, 0.3, -0.3, -0.1})}, {"grid_points", 0},
         {"save_realizations", true}};
  } else if (sub == "wegner") {
    c["model"]["m"] = 0.2;
    n["cutoff"] = 3.0;
    n["L_list"] = json::array({3, 4, 5, 6});
    c["disorder"] = disorder_defaults(0.1);
    t = {{"n_real", 200}, {"widths", json::array({0.0025, 0.005, 0.01, 0.02, 0.04})}, {"center", -1.0}};
  } else if (sub == "chern") {
    c["model"]["m"] = 0.2;
    n["cutoff"] = 3.0;
    n["kgrid"] = 12;
    c["disorder"] = disorder_defaults(0.0);
    t = {{"windows", json::array({0.1, 0.3, -0.3, -0.1})},
         {"theta1_offset", 0.0},
         {"theta2_offset", 0.0},
         {"half_width", -1.0},
         {"plaquette", true},
         {"decay", true}};
  } else if (sub == "transport") {
    n["cutoff"] = 3.0;
    c["disorder"] = disorder_defaults(0.4);
    t = {{"p", 2.0},
         {"windows", json::array({-0.4, 0.4})},
         {"t_max", 250.0},
         {"dt", 0.5},
         {"T_list", json::array({1.0, 10.0, 50.0})},
         {"n_real", 4}};
  } else if (sub == "wannier-moment") {
    n["cutoff"] = 3.0;
    n["L_list"] = json::array({4, 5, 6, 7, 8, 9, 10, 11, 12});
    t = {{"p", json::array({0.75, 1.25})}, {"cell_points", 8}, {"check_cutoff", 12.0}};
  } else {
    throw ConfigError("unknown subcommand '" + sub + "'");
  }
  return c;
}

json merge_strict(const json& base, const json& over, const std::string& where) {
  if (where == "/model/potential") {
    check_potential(over, where);
    return over;
  }
  if (is_complex_slot(where)) return normalize_complex(over, where);
  if (base.is_object()) {
    if (!over.is_object()) fail(where, "expected an object");
    json out = base;
    for (const auto& [k, v] : over.items()) {
      std::string w = where + "/" + k;
      if (!base.contains(k)) fail(w, "unknown key");
      if (w == "/disorder" && base[k].is_null()) {
        if (v.is_null()) continue;
        fail(w, "not used by this subcommand");
      }
      out[k] = merge_strict(base[k], v, w);
    }
    return out;
  }
  if (base.is_boolean()) {
    if (!over.is_boolean()) fail(where, "expected a boolean");
    return over;
  }
  if (base.is_number_integer()) {
    if (over.is_number_integer()) return over;
    if (over.is_number_float() && std::floor(over.get<double>()) == over.get<double>()) return json(over.get<long long>());
    fail(where, "expected an integer");
  }
  if (base.is_number()) {
    if (!over.is_number()) fail(where, "expected a number");
    return json(over.get<double>());
  }
  if (base.is_string()) {
    if (!over.is_string()) fail(where, "expected a string");
    return over;
  }
  if (base.is_array()) {
    if (!over.is_array()) fail(where, "expected an array");
    const bool ints = !base.empty() && base[0].is_number_integer();
    json out = json::array();
    for (const auto& e : over) {
      if (!e.is_number()) fail(where, "expected numbers");
      if (ints && !e.is_number_integer()) fail(where, "expected integers");
      out.push_back(ints ? json(e.get<long long>()) : json(e.get<double>()));
    }
    return out;
  }
  fail(where, "unsupported entry");
}

json load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

void apply_override(json& cfg, const std::string& pointer, const std::string& text) {
  json::json_pointer p(pointer);
  if (!cfg.contains(p)) fail(pointer, "unknown key");
  const json& target = cfg[p];
  json v;
  auto number = [&](const std::string& s) -> json {
    std::size_t used = 0;
    try {
      if (s.find_first_of(".eE") == std::string::npos) {
        long long i = std::stoll(s, &used);
        if (used == s.size()) return i;
      }
      double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
    fail(pointer, "cannot parse '" + s + "' as a number");
  };
  if (target.is_array()) {
    v = json::array();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(number(item));
  } else if (target.is_boolean()) {
    if (text != "true" && text != "false") fail(pointer, "expected true or false");
    v = text == "true";
  } else if (target.is_number()) {
    v = number(text);
  } else if (target.is_string()) {
    v = text;
  } else {
    fail(pointer, "cannot be overridden from the command line");
  }
  json over = json::object();
  over[p] = v;
  cfg = merge_strict(cfg, over);
}

double get_double(const json& cfg, const std::string& pointer) { return at(cfg, pointer).get<double>(); }
int get_int(const json& cfg, const std::string& pointer) { return at(cfg, pointer).get<int>(); }
bool get_bool(const json& cfg, const std::string& pointer) { return at(cfg, pointer).get<bool>(); }

tbg::cplx get_complex(const json& cfg, const std::string& pointer) {
  const json& v = at(cfg, pointer);
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<double> get_doubles(const json& cfg, const std::string& pointer) {
  return at(cfg, pointer).get<std::vector<double>>();
}

std::vector<int> get_ints(const json& cfg, const std::string& pointer) { return at(cfg, pointer).get<std::vector<int>>(); }

std::vector<tbg::Interval> get_intervals(const json& cfg, const std::string& pointer) {
  auto v = get_doubles(cfg, pointer);
  if (v.size() % 2) fail(pointer, "expected pairs lo, hi");
  std::vector<tbg::Interval> out;
  for (std::size_t i = 0; i < v.size(); i += 2) {
    if (!(v[i] < v[i + 1])) fail(pointer, "interval with lo >= hi");
    out.push_back({v[i], v[i + 1]});
  }
  return out;
}

tbg::PotentialSpec potential_from(const json& cfg) {
  const json& v = at(cfg, "/model/potential");
  if (v.is_string()) return tbg::default_potential();
  tbg::PotentialSpec p;
  p.label = v.value("label", std::string("custom"));
  for (const auto& m : v["modes"]) {
    json mo = normalize_complex(m["momentum"], "momentum"), co = normalize_complex(m["coeff"], "coeff");
    p.modes.push_back({{mo[0].get<double>(), mo[1].get<double>()}, {co[0].get<double>(), co[1].get<double>()}});
  }
  try {
    tbg::potential_shifts(p);
  } catch (const std::invalid_argument& e) {
    fail("/model/potential", e.what());
  }
  return p;
}

tbg::DisorderConfig disorder_from(const json& cfg) {
  const json& d = at(cfg, "/disorder");
  if (d.is_null()) fail("/disorder", "missing");
  tbg::DisorderConfig c;
  c.lambda = d["lambda"].get<double>();
  std::string kind = d["kind"].get<std::string>();
  if (kind == "case1")
    c.kind = tbg::DisorderCase::Case1;
  else if (kind == "case2")
    c.kind = tbg::DisorderCase::Case2;
  else
    fail("/disorder/kind", "expected case1 or case2");
  c.bump_radius = d["bump_radius"].get<double>();
  c.relax_radius = d["relax_radius"].get<double>();
  c.density_scale = d["density_scale"].get<double>();
  c.case1_ratio = d["case1_ratio"].get<double>();
  c.case1_phase = d["case1_phase"].get<double>();
  try {
    tbg::validate(c);
  } catch (const std::invalid_argument& e) {
    fail("/disorder", e.what());
  }
  return c;
}

}  // namespace tbgcli
