#include "ncsg/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "ncsg/errors.hpp"

namespace ncsg {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& prefix,
                         std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown key", prefix + "/" + item.key());
  }
}

const json* get(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& ptr) {
  if (!v.is_number()) throw ConfigError("expected a number", ptr);
  return v.get<double>();
}

int as_int(const json& v, const std::string& ptr) {
  if (!v.is_number_integer()) throw ConfigError("expected an integer", ptr);
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& ptr) {
  if (!v.is_string()) throw ConfigError("expected a string", ptr);
  return v.get<std::string>();
}

std::vector<double> as_number_list(const json& v, const std::string& ptr) {
  if (!v.is_array()) throw ConfigError("expected an array of numbers", ptr);
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_number(v[i], ptr + "/" + std::to_string(i)));
  return out;
}

std::vector<int> as_int_list(const json& v, const std::string& ptr) {
  if (!v.is_array()) throw ConfigError("expected an array of integers", ptr);
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_int(v[i], ptr + "/" + std::to_string(i)));
  return out;
}

GroupDescriptor parse_group(const json& g) {
  if (!g.is_object()) throw ConfigError("expected an object", "/group");
  reject_unknown_keys(g, "/group", {"kind", "dim", "points", "grid"});
  const json* kind = get(g, "kind");
  if (!kind) throw ConfigError("missing key", "/group/kind");
  const std::string k = as_string(*kind, "/group/kind");
  if (k == "torus") {
    if (get(g, "grid")) throw ConfigError("torus uses \"points\", not \"grid\"", "/group/grid");
    int dim = 1;
    if (const json* d = get(g, "dim")) dim = as_int(*d, "/group/dim");
    const json* pts = get(g, "points");
    if (!pts) throw ConfigError("missing key", "/group/points");
    return GroupDescriptor::torus(dim, as_int(*pts, "/group/points"));
  }
  if (k == "su2") {
    if (get(g, "dim")) throw ConfigError("su2 has no \"dim\"", "/group/dim");
    if (get(g, "points")) throw ConfigError("su2 uses \"grid\", not \"points\"", "/group/points");
    const json* grid = get(g, "grid");
    if (!grid) throw ConfigError("missing key", "/group/grid");
    std::vector<int> m = as_int_list(*grid, "/group/grid");
    if (m.size() != 3)
      throw ConfigError("expected [m_alpha, m_beta, m_gamma]", "/group/grid");
    return GroupDescriptor::su2(m[0], m[1], m[2]);
  }
  throw ConfigError("kind must be \"torus\" or \"su2\"", "/group/kind");
}

SymbolSpec parse_symbol(const json& s) {
  if (!s.is_object()) throw ConfigError("expected an object", "/symbol");
  reject_unknown_keys(s, "/symbol", {"family", "power", "resolvent_c", "expr", "path"});
  const json* fam = get(s, "family");
  if (!fam) throw ConfigError("missing key", "/symbol/family");
  const std::string f = as_string(*fam, "/symbol/family");
  SymbolSpec spec;
  if (f == "multiplier_power") {
    spec.family = SymbolSpec::Family::multiplier_power;
  } else if (f == "multiplication") {
    spec.family = SymbolSpec::Family::multiplication;
  } else if (f == "product") {
    spec.family = SymbolSpec::Family::product;
  } else if (f == "corner_projection") {
    spec.family = SymbolSpec::Family::corner_projection;
  } else if (f == "laplacian_resolvent") {
    spec.family = SymbolSpec::Family::laplacian_resolvent;
  } else if (f == "scalar_expr") {
    spec.family = SymbolSpec::Family::scalar_expr;
  } else if (f == "file") {
    spec.family = SymbolSpec::Family::file;
  } else {
    throw ConfigError("unknown symbol family \"" + f + "\"", "/symbol/family");
  }
  if (const json* p = get(s, "power")) spec.power = as_number(*p, "/symbol/power");
  if (const json* c = get(s, "resolvent_c"))
    spec.resolvent_c = as_number(*c, "/symbol/resolvent_c");
  if (const json* e = get(s, "expr")) spec.expr = as_string(*e, "/symbol/expr");
  if (const json* p = get(s, "path")) spec.path = as_string(*p, "/symbol/path");
  const bool needs_expr = spec.family == SymbolSpec::Family::multiplication ||
                          spec.family == SymbolSpec::Family::product ||
                          spec.family == SymbolSpec::Family::scalar_expr;
  if (needs_expr && spec.expr.empty())
    throw ConfigError("this family requires \"expr\"", "/symbol/expr");
  if (spec.family == SymbolSpec::Family::file && spec.path.empty())
    throw ConfigError("the file family requires \"path\"", "/symbol/path");
  return spec;
}

WitnessConfig parse_witness(const json& w) {
  if (!w.is_object()) throw ConfigError("expected an object", "/analysis/witness");
  reject_unknown_keys(w, "/analysis/witness", {"band", "radius", "expr"});
  WitnessConfig out;
  if (const json* b = get(w, "band")) out.band = as_number(*b, "/analysis/witness/band");
  if (const json* r = get(w, "radius"))
    out.radius = as_number(*r, "/analysis/witness/radius");
  if (const json* e = get(w, "expr")) out.expr = as_string(*e, "/analysis/witness/expr");
  return out;
}

ResolventConfig parse_resolvent(const json& r) {
  if (!r.is_object()) throw ConfigError("expected an object", "/analysis/resolvent");
  reject_unknown_keys(r, "/analysis/resolvent", {"re", "im", "r_min"});
  ResolventConfig out;
  if (const json* v = get(r, "re")) out.re = as_number(*v, "/analysis/resolvent/re");
  if (const json* v = get(r, "im")) out.im = as_number(*v, "/analysis/resolvent/im");
  if (const json* v = get(r, "r_min"))
    out.r_min = as_number(*v, "/analysis/resolvent/r_min");
  return out;
}

AnalysisConfig parse_analysis(const json& a) {
  if (!a.is_object()) throw ConfigError("expected an object", "/analysis");
  reject_unknown_keys(a, "/analysis",
                      {"shells", "k_fixed", "lambda_list", "r_list", "xi_sequence",
                       "witness", "floor_tol", "compact_tol", "interior_cap",
                       "resolvent", "seminorm_orders", "seminorm_rho",
                       "elliptic_threshold", "elliptic_r_min"});
  AnalysisConfig out;
  if (const json* v = get(a, "shells")) out.shells = as_number_list(*v, "/analysis/shells");
  if (const json* v = get(a, "k_fixed")) out.k_fixed = as_int(*v, "/analysis/k_fixed");
  if (const json* v = get(a, "lambda_list"))
    out.lambda_list = as_number_list(*v, "/analysis/lambda_list");
  if (const json* v = get(a, "r_list")) out.r_list = as_number_list(*v, "/analysis/r_list");
  if (const json* v = get(a, "xi_sequence"))
    out.xi_sequence = as_int_list(*v, "/analysis/xi_sequence");
  if (const json* v = get(a, "witness")) out.witness = parse_witness(*v);
  if (const json* v = get(a, "floor_tol"))
    out.floor_tol = as_number(*v, "/analysis/floor_tol");
  if (const json* v = get(a, "compact_tol"))
    out.compact_tol = as_number(*v, "/analysis/compact_tol");
  if (const json* v = get(a, "interior_cap"))
    out.interior_cap = as_number(*v, "/analysis/interior_cap");
  if (const json* v = get(a, "resolvent")) out.resolvent = parse_resolvent(*v);
  if (const json* v = get(a, "seminorm_orders")) {
    std::vector<int> ab = as_int_list(*v, "/analysis/seminorm_orders");
    if (ab.size() != 2)
      throw ConfigError("expected [alpha_max, beta_max]", "/analysis/seminorm_orders");
    out.seminorm_alpha = ab[0];
    out.seminorm_beta = ab[1];
  }
  if (const json* v = get(a, "seminorm_rho"))
    out.seminorm_rho = as_number(*v, "/analysis/seminorm_rho");
  if (const json* v = get(a, "elliptic_threshold"))
    out.elliptic_threshold = as_number(*v, "/analysis/elliptic_threshold");
  if (const json* v = get(a, "elliptic_r_min"))
    out.elliptic_r_min = as_number(*v, "/analysis/elliptic_r_min");
  return out;
}

FieldConfig parse_field(const json& f) {
  if (!f.is_object()) throw ConfigError("expected an object", "/field");
  reject_unknown_keys(f, "/field", {"expr", "band"});
  FieldConfig out;
  const json* e = get(f, "expr");
  if (!e) throw ConfigError("missing key", "/field/expr");
  out.expr = as_string(*e, "/field/expr");
  if (const json* b = get(f, "band")) out.band = as_int(*b, "/field/band");
  return out;
}

OutputConfig parse_output(const json& o) {
  if (!o.is_object()) throw ConfigError("expected an object", "/output");
  reject_unknown_keys(o, "/output", {"path", "format", "symbol_path"});
  OutputConfig out;
  if (const json* p = get(o, "path")) out.path = as_string(*p, "/output/path");
  if (const json* f = get(o, "format")) out.format = as_string(*f, "/output/format");
  if (const json* s = get(o, "symbol_path"))
    out.symbol_path = as_string(*s, "/output/symbol_path");
  if (out.format != "json" && out.format != "csv")
    throw ConfigError("format must be \"json\" or \"csv\"", "/output/format");
  return out;
}

std::vector<double> geometric_up_to(double lambda) {
  // Λ/8, Λ/4, Λ/2, Λ
  return {lambda / 8.0, lambda / 4.0, lambda / 2.0, lambda};
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what(), "/");
  }
  if (!root.is_object()) throw ConfigError("expected a JSON object", "/");
  reject_unknown_keys(root, "",
                      {"group", "lambda", "symbol", "field", "analysis", "output"});

  const json* g = get(root, "group");
  if (!g) throw ConfigError("missing key", "/group");

  RunConfig cfg;
  cfg.group = parse_group(*g);
  try {
    cfg.group.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what(), "/group");
  }
  cfg.grid_exactness = quadrature_grid(cfg.group).exactness_degree;

  if (const json* l = get(root, "lambda")) {
    cfg.lambda = as_number(*l, "/lambda");
    if (cfg.lambda < 1.0) throw ConfigError("lambda must be >= 1", "/lambda");
    if (cfg.lambda > cfg.grid_exactness + 1e-12)
      throw ConfigError("lambda exceeds the grid exactness degree", "/lambda");
  } else {
    cfg.lambda = cfg.grid_exactness / 2.0;
    if (cfg.lambda < 1.0) cfg.lambda = cfg.grid_exactness;
  }

  if (const json* s = get(root, "symbol")) cfg.symbol = parse_symbol(*s);
  if (const json* f = get(root, "field")) cfg.field = parse_field(*f);
  if (const json* a = get(root, "analysis")) cfg.analysis = parse_analysis(*a);
  if (const json* o = get(root, "output")) cfg.output = parse_output(*o);

  if (cfg.analysis.shells.empty()) cfg.analysis.shells = geometric_up_to(cfg.lambda);
  // lambda_list stays empty here; commands default it to the geometric ladder
  // capped by the symbol's assembly margin (exactness − x_band).
  if (cfg.analysis.r_list.empty())
    cfg.analysis.r_list = {cfg.lambda / 16.0, cfg.lambda / 8.0, cfg.lambda / 4.0};
  if (cfg.analysis.witness.band <= 0.0 && cfg.analysis.witness.expr.empty()) {
    // Λ/8, floored so the bump keeps a nontrivial irrep (su2 weights start
    // at √1.75, so the floor sits higher there).
    const double floor = cfg.group.kind == GroupKind::su2 ? 1.5 : 1.0;
    cfg.analysis.witness.band = std::max(cfg.lambda / 8.0, floor);
  }
  if (cfg.analysis.interior_cap <= 0.0) cfg.analysis.interior_cap = cfg.lambda / 2.0;
  if (cfg.analysis.k_fixed < 0)
    throw ConfigError("k_fixed must be nonnegative", "/analysis/k_fixed");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace ncsg
