#include "bargmann/experiment/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace bargmann::experiment {

namespace {

const std::set<std::string>& known_commands() {
  static const std::set<std::string> c{"model-check", "renorm", "sweep", "zeroset"};
  return c;
}

const std::map<std::string, std::set<std::string>>& known_thresholds() {
  static const std::map<std::string, std::set<std::string>> t{
      {"model-check",
       {"curvature_error_max", "fd_order_min", "fd_order_max", "radial_defect_max", "holomorphy_gap_max"}},
      {"renorm",
       {"metric_c0_max", "connection_deviation_max", "connection_radial_defect_max", "gauge_drift_max"}},
      {"sweep", {"require_cauchy", "dbar_ratio_max", "metric_slope_min", "metric_slope_max"}},
      {"zeroset",
       {"converged_fraction_min", "symplectic_margin_min", "transversality_min", "curvature_ratio_max"}},
  };
  return t;
}

cplx parse_complex(const YAML::Node& node) {
  if (node.IsScalar()) return {node.as<double>(), 0.0};
  if (node.IsSequence() && node.size() == 2) return {node[0].as<double>(), node[1].as<double>()};
  throw ConfigError("complex numbers are written as x or [re, im]");
}

std::vector<cplx> parse_complex_list(const YAML::Node& node) {
  if (!node.IsSequence()) throw ConfigError("expected a list of coefficients");
  std::vector<cplx> out;
  for (const auto& c : node) out.push_back(parse_complex(c));
  return out;
}

RVec parse_point(const YAML::Node& node) {
  if (!node.IsSequence()) throw ConfigError("a point is a list of real coordinates");
  RVec p(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) p[static_cast<Eigen::Index>(i)] = node[i].as<double>();
  return p;
}

YAML::Node emit_complex(cplx c) {
  YAML::Node n;
  if (c.imag() == 0.0) {
    n = c.real();
  } else {
    n.push_back(c.real());
    n.push_back(c.imag());
    n.SetStyle(YAML::EmitterStyle::Flow);
  }
  return n;
}

YAML::Node emit_complex_list(const std::vector<cplx>& v) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (const auto& c : v) n.push_back(emit_complex(c));
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

YAML::Node emit_point(const RVec& p) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (Eigen::Index i = 0; i < p.size(); ++i) n.push_back(p[i]);
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

int degree(const std::vector<cplx>& p) {
  int d = -1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] != cplx{}) d = static_cast<int>(i);
  }
  return d;
}

ExperimentConfig from_node(const YAML::Node& root) {
  if (!root.IsMap()) throw ConfigError("configuration must be a mapping");
  ExperimentConfig c;
  static const std::set<std::string> top{"command", "name", "seed", "backend", "family", "ladder",
                                         "center", "centers", "grid", "diagnostics", "thresholds"};
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!top.count(key)) throw ConfigError("unknown configuration key '" + key + "'");
  }
  if (root["command"]) c.command = root["command"].as<std::string>();
  if (root["name"]) c.name = root["name"].as<std::string>();
  if (root["seed"]) c.seed = root["seed"].as<std::uint64_t>();
  if (const auto b = root["backend"]) {
    if (b["kind"]) c.backend.kind = b["kind"].as<std::string>();
    if (b["n"]) c.backend.n = b["n"].as<int>();
  }
  if (const auto f = root["family"]) {
    if (f["kind"]) c.family.kind = f["kind"].as<std::string>();
    if (f["j"]) c.family.j = f["j"].as<int>();
    if (f["limit"]) c.family.limit = parse_complex_list(f["limit"]);
    if (f["coefficients"]) c.family.coefficients = parse_complex_list(f["coefficients"]);
    if (const auto terms = f["terms"]) {
      for (const auto& t : terms) {
        LimitProduct p;
        p.coeff = t["coeff"] ? parse_complex(t["coeff"]) : cplx{1.0};
        if (!t["first"] || !t["second"]) throw ConfigError("product terms need 'first' and 'second'");
        p.first = parse_complex_list(t["first"]);
        p.second = parse_complex_list(t["second"]);
        c.family.terms.push_back(std::move(p));
      }
    }
  }
  if (const auto l = root["ladder"]) {
    c.ladder.clear();
    for (const auto& k : l) c.ladder.push_back(k.as<int>());
  }
  if (root["center"] && root["centers"]) throw ConfigError("give either 'center' or 'centers'");
  if (root["center"]) c.centers = {parse_point(root["center"])};
  if (const auto cs = root["centers"]) {
    for (const auto& p : cs) c.centers.push_back(parse_point(p));
  }
  if (const auto g = root["grid"]) {
    if (g["points"]) c.grid.points = g["points"].as<int>();
    if (g["radius"]) c.grid.radius = g["radius"].as<double>();
  }
  if (const auto d = root["diagnostics"]) {
    if (d["order"]) c.diagnostics.order = d["order"].as<int>();
    if (d["subball"]) c.diagnostics.subball = d["subball"].as<double>();
    if (d["epsilon_fraction"]) c.diagnostics.epsilon_fraction = d["epsilon_fraction"].as<double>();
    if (d["epsilon"]) c.diagnostics.epsilon = d["epsilon"].as<double>();
    if (d["dbar_mode"]) c.diagnostics.dbar_mode = d["dbar_mode"].as<std::string>();
    if (d["zero_tolerance"]) c.diagnostics.zero_tolerance = d["zero_tolerance"].as<double>();
  }
  if (const auto t = root["thresholds"]) {
    for (const auto& kv : t) {
      const YAML::Node v = kv.second;
      double value = 0.0;
      if (v.IsScalar() && (v.Scalar() == "true" || v.Scalar() == "false")) {
        value = v.as<bool>() ? 1.0 : 0.0;
      } else {
        value = v.as<double>();
      }
      c.thresholds[kv.first.as<std::string>()] = value;
    }
  }
  return c;
}

}  // namespace

RVec ExperimentConfig::center_for(std::size_t rung) const {
  if (centers.empty()) {
    const int dim = backend.kind == "none" ? 2 : 2 * backend.n;
    return RVec::Zero(dim);
  }
  return centers.size() == 1 ? centers.front() : centers.at(rung);
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  try {
    return from_node(YAML::Load(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("configuration parse error: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> preset_names() {
  return {"model-check", "torus1-ladder", "cp1-ladder", "torus2-prop1", "torus2-ladder"};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  if (name == "model-check") {
    c.command = "model-check";
    c.backend.kind = "none";
    c.ladder = {1};
    c.grid = {33, 1.0};
    c.thresholds = {{"curvature_error_max", 1e-12},
                    {"fd_order_min", 1.8},
                    {"fd_order_max", 2.2},
                    {"radial_defect_max", 1e-12},
                    {"holomorphy_gap_max", 1e-8}};
  } else if (name == "torus1-ladder") {
    c.command = "sweep";
    c.backend = {"torus", 1};
    c.family.kind = "theta";
    c.family.j = 0;
    c.ladder = {4, 16, 64};
    c.centers = {RVec::Zero(2)};
    c.grid = {129, 0.9};
    c.thresholds = {{"require_cauchy", 1.0}, {"dbar_ratio_max", 0.5}};
  } else if (name == "cp1-ladder") {
    c.command = "sweep";
    c.backend = {"cp1", 1};
    c.family.kind = "cp1-limit";
    c.family.limit = {cplx{-0.2, 0.1}, 1.0};
    c.ladder = {8, 32, 128};
    c.centers = {RVec::Zero(2)};
    c.grid = {129, 0.9};
    c.thresholds = {{"require_cauchy", 1.0}, {"metric_slope_min", -1.3}, {"metric_slope_max", -0.7}};
  } else if (name == "torus2-prop1" || name == "torus2-ladder") {
    c.command = "zeroset";
    c.backend = {"torus", 2};
    c.family.kind = "product-limit";
    c.family.terms = {{1.0, {0.0, 1.0}, {1.0}}, {-0.5, {1.0}, {0.0, 0.0, 1.0}}, {0.1, {1.0}, {1.0}}};
    c.centers = {RVec::Zero(4)};
    c.grid = {33, 0.9};
    c.thresholds = {{"converged_fraction_min", 0.95}, {"symplectic_margin_min", 0.5}, {"transversality_min", 0.0}};
    if (name == "torus2-prop1") {
      c.ladder = {16};
    } else {
      c.ladder = {4, 16, 64};
      c.thresholds["curvature_ratio_max"] = 3.0;
    }
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

void apply(ExperimentConfig& config, const Overrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.ladder) config.ladder = *o.ladder;
  if (o.center) config.centers = {*o.center};
  if (o.grid) config.grid = *o.grid;
  if (o.epsilon) config.diagnostics.epsilon = *o.epsilon;
}

void validate(const ExperimentConfig& c) {
  if (!known_commands().count(c.command)) throw ConfigError("unknown command '" + c.command + "'");
  if (c.ladder.empty()) throw ConfigError("ladder must not be empty");
  for (std::size_t i = 0; i < c.ladder.size(); ++i) {
    if (c.ladder[i] < 1) throw ConfigError("ladder powers must be positive");
    if (i > 0 && c.ladder[i] <= c.ladder[i - 1]) throw ConfigError("ladder must be strictly increasing");
  }
  if (c.command == "sweep" && c.ladder.size() < 3) throw ConfigError("sweep needs at least 3 ladder rungs");
  if (c.grid.points < 3) throw ConfigError("grid needs at least 3 points per axis");
  if (!(c.grid.radius > 0.0 && c.grid.radius <= 1.0)) throw ConfigError("grid radius must lie in (0, 1]");
  const auto& d = c.diagnostics;
  if (d.order < 0 || d.order > 3) throw ConfigError("diagnostics.order must lie in [0, 3]");
  if (!(d.subball > 0.0 && d.subball < c.grid.radius)) {
    throw ConfigError("diagnostics.subball must lie in (0, grid radius)");
  }
  const double h = 2.0 * c.grid.radius / (c.grid.points - 1);
  if (c.command == "sweep" && d.subball + d.order * h > c.grid.radius) {
    throw ConfigError("diagnostics.subball + order * h exceeds the grid radius");
  }
  if (!(d.epsilon_fraction > 0.0)) throw ConfigError("diagnostics.epsilon_fraction must be positive");
  if (d.epsilon && !(*d.epsilon > 0.0)) throw ConfigError("diagnostics.epsilon must be positive");
  if (!(d.zero_tolerance > 0.0)) throw ConfigError("diagnostics.zero_tolerance must be positive");
  if (d.dbar_mode != "finite-difference" && d.dbar_mode != "analytic") {
    throw ConfigError("diagnostics.dbar_mode must be finite-difference or analytic");
  }
  const auto& allowed = known_thresholds().at(c.command);
  for (const auto& [key, value] : c.thresholds) {
    if (!allowed.count(key)) throw ConfigError("threshold '" + key + "' does not apply to " + c.command);
    if (key.size() > 4 && key.compare(key.size() - 4, 4, "_max") == 0 && !(value > 0.0) &&
        key != "metric_slope_max") {
      throw ConfigError("tolerance '" + key + "' must be positive");
    }
  }

  if (c.command == "model-check") return;

  const auto& b = c.backend;
  int n = 1;
  if (b.kind == "torus") {
    if (b.n != 1 && b.n != 2) throw ConfigError("torus backend needs n = 1 or 2");
    n = b.n;
  } else if (b.kind == "cp1") {
    if (b.n != 1) throw ConfigError("cp1 backend has n = 1");
  } else {
    throw ConfigError("backend.kind must be torus or cp1");
  }
  if (!c.centers.empty() && c.centers.size() != 1 && c.centers.size() != c.ladder.size()) {
    throw ConfigError("give one center or one per ladder rung");
  }
  for (const auto& p : c.centers) {
    if (p.size() != 2 * n) throw ConfigError("center dimension must be 2n");
    if (b.kind == "cp1" && p.norm() > 4.8) throw ConfigError("cp1 centers must satisfy |w| <= 4.8");
  }

  const auto& f = c.family;
  const int kmin = c.ladder.front();
  if (f.kind == "theta") {
    if (b.kind != "torus" || n != 1) throw ConfigError("theta family needs the n = 1 torus");
    if (f.j < 0 || f.j >= kmin) throw ConfigError("theta characteristic j must lie in [0, k) for every rung");
  } else if (f.kind == "theta-limit") {
    if (b.kind != "torus" || n != 1) throw ConfigError("theta-limit family needs the n = 1 torus");
    if (degree(f.limit) < 0) throw ConfigError("theta-limit needs a nonzero limit polynomial");
  } else if (f.kind == "product-limit") {
    if (b.kind != "torus" || n != 2) throw ConfigError("product-limit family needs the n = 2 torus");
    if (f.terms.empty()) throw ConfigError("product-limit needs at least one term");
  } else if (f.kind == "cp1-limit") {
    if (b.kind != "cp1") throw ConfigError("cp1-limit family needs the cp1 backend");
    if (degree(f.limit) > kmin) throw ConfigError("cp1-limit degree exceeds the smallest k");
  } else if (f.kind == "cp1") {
    if (b.kind != "cp1") throw ConfigError("cp1 family needs the cp1 backend");
    if (degree(f.coefficients) > kmin) throw ConfigError("cp1 coefficient degree exceeds the smallest k");
  } else {
    throw ConfigError("unknown family kind '" + f.kind + "'");
  }
}

std::string to_yaml(const ExperimentConfig& c) {
  YAML::Node root;
  root["command"] = c.command;
  root["name"] = c.name;
  root["seed"] = c.seed;
  root["backend"]["kind"] = c.backend.kind;
  root["backend"]["n"] = c.backend.n;
  root["family"]["kind"] = c.family.kind;
  root["family"]["j"] = c.family.j;
  root["family"]["limit"] = emit_complex_list(c.family.limit);
  root["family"]["coefficients"] = emit_complex_list(c.family.coefficients);
  YAML::Node terms(YAML::NodeType::Sequence);
  for (const auto& t : c.family.terms) {
    YAML::Node n;
    n["coeff"] = emit_complex(t.coeff);
    n["first"] = emit_complex_list(t.first);
    n["second"] = emit_complex_list(t.second);
    terms.push_back(n);
  }
  root["family"]["terms"] = terms;
  YAML::Node ladder(YAML::NodeType::Sequence);
  for (int k : c.ladder) ladder.push_back(k);
  ladder.SetStyle(YAML::EmitterStyle::Flow);
  root["ladder"] = ladder;
  YAML::Node centers(YAML::NodeType::Sequence);
  if (c.centers.empty()) {
    centers.push_back(emit_point(c.center_for(0)));
  } else {
    for (const auto& p : c.centers) centers.push_back(emit_point(p));
  }
  root["centers"] = centers;
  root["grid"]["points"] = c.grid.points;
  root["grid"]["radius"] = c.grid.radius;
  root["diagnostics"]["order"] = c.diagnostics.order;
  root["diagnostics"]["subball"] = c.diagnostics.subball;
  root["diagnostics"]["epsilon_fraction"] = c.diagnostics.epsilon_fraction;
  if (c.diagnostics.epsilon) root["diagnostics"]["epsilon"] = *c.diagnostics.epsilon;
  root["diagnostics"]["dbar_mode"] = c.diagnostics.dbar_mode;
  root["diagnostics"]["zero_tolerance"] = c.diagnostics.zero_tolerance;
  YAML::Node th(YAML::NodeType::Map);
  for (const auto& [k, v] : c.thresholds) th[k] = v;
  root["thresholds"] = th;
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << root;
  return std::string(out.c_str()) + "\n";
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_double_list(text)) {
    if (v != static_cast<int>(v)) throw ConfigError("expected integers in '" + text + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse number list '" + text + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

}  // namespace bargmann::experiment
