#include "bargmann/experiment/runner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "bargmann/error.hpp"
#include "bargmann/renormalize.hpp"
#include "bargmann/theta.hpp"

namespace bargmann::experiment {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

Check make_check(std::string name, double value, std::string relation, double threshold) {
  bool pass = false;
  if (relation == "<=") pass = value <= threshold;
  else if (relation == ">=") pass = value >= threshold;
  else if (relation == "<") pass = value < threshold;
  else if (relation == ">") pass = value > threshold;
  else if (relation == "==") pass = value == threshold;
  return {std::move(name), value, std::move(relation), threshold, pass};
}

DiagnosticsRecord base_record(const ExperimentConfig& c, int k, const BallDomain& grid) {
  DiagnosticsRecord r;
  r.experiment = c.name;
  r.k = k;
  r.points_per_axis = grid.points_per_axis();
  r.radius = grid.radius();
  r.spacing = grid.spacing();
  r.tolerances["fd_step"] = grid.spacing();
  return r;
}

void put(DiagnosticsRecord& r, const std::string& key, double value, const std::string& flag = {}) {
  if (std::isfinite(value)) {
    r.values[key] = value;
  } else {
    r.flags.push_back(flag.empty() ? key + ": non-finite" : flag);
  }
}

double lookup(const DiagnosticsRecord& r, const std::string& key) {
  auto it = r.values.find(key);
  return it == r.values.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
}

Table table_from(const std::string& name, const std::vector<std::string>& columns,
                 const std::vector<DiagnosticsRecord>& records) {
  Table t;
  t.name = name;
  t.header = {"k", "points_per_axis", "radius", "spacing"};
  t.header.insert(t.header.end(), columns.begin(), columns.end());
  for (const auto& r : records) {
    std::vector<double> row{static_cast<double>(r.k), static_cast<double>(r.points_per_axis), r.radius, r.spacing};
    for (const auto& c : columns) row.push_back(lookup(r, c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

double epsilon_for(const ExperimentConfig& c, const GridSection& s) {
  return c.diagnostics.epsilon ? *c.diagnostics.epsilon : c.diagnostics.epsilon_fraction * default_epsilon(s) / 0.1;
}

void record_transversality(DiagnosticsRecord& r, const ExperimentConfig& c, const GridSection& s) {
  const double eps = epsilon_for(c, s);
  r.tolerances["epsilon"] = eps;
  if (!(eps > 0.0)) {
    r.flags.push_back("transversality: zero section, margin undefined");
    return;
  }
  const TransversalityResult t = transversality_margin(s, eps);
  r.values["near_zero_nodes"] = static_cast<double>(t.near_zero_nodes);
  if (t.empty) {
    r.flags.push_back("transversality: no node with |sigma| <= epsilon, margin +inf");
  } else {
    r.values["transversality_eta"] = t.eta;
  }
}

// x^3 y + e^x y^2 on the first plane: a gauge change of the model connection
// with nonlinear coefficients, so difference quotients are not exact.
ConnectionField gauge_changed_connection(int n) {
  ConnectionField f = model_connection_field(n);
  f.coefficients = [](const RVec& z) {
    RVec a = model_connection_coefficients(z);
    const double x = z[0], y = z[1];
    a[0] += 3.0 * x * x * y + std::exp(x) * y * y;
    a[1] += x * x * x + 2.0 * std::exp(x) * y;
    return a;
  };
  f.jacobian = nullptr;
  return f;
}

PolyTable random_polynomial(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> terms_dist(1, 6);
  std::uniform_int_distribution<int> deg_dist(0, 5);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution conj_dist(0.3);
  PolyTable p(n);
  const int terms = terms_dist(rng);
  for (int t = 0; t < terms; ++t) {
    int budget = deg_dist(rng);
    std::vector<int> holo(n, 0), anti(n, 0);
    const bool with_conj = conj_dist(rng);
    for (int a = 0; a < n && budget > 0; ++a) {
      std::uniform_int_distribution<int> part(0, budget);
      holo[a] = part(rng);
      budget -= holo[a];
      if (with_conj && budget > 0) {
        anti[a] = part(rng) % (budget + 1);
        budget -= anti[a];
      }
    }
    const double re = normal(rng);
    const double im = normal(rng);
    p.add(holo, cplx{re, im}, anti);
  }
  return p;
}

void run_model_check(Outcome& out) {
  const ExperimentConfig& c = out.config;
  const ModelCheckResult m = model_check(c);
  DiagnosticsRecord r;
  r.experiment = c.name;
  r.points_per_axis = c.grid.points;
  r.radius = c.grid.radius;
  r.spacing = 2.0 * c.grid.radius / (c.grid.points - 1);
  r.values = {{"curvature_error", m.curvature_error},
              {"fd_error_coarse", m.fd_error_coarse},
              {"fd_error_fine", m.fd_error_fine},
              {"fd_order", m.fd_order},
              {"radial_defect", m.radial_defect},
              {"holomorphy_gap", m.holomorphy_gap},
              {"polynomials", static_cast<double>(m.polynomials)}};
  r.tolerances = {{"fd_step_coarse", 0.02}, {"fd_step_fine", 0.01}};
  out.report.records.push_back(r);
  out.tables.push_back(table_from(c.name + "_model", {"curvature_error", "fd_order", "radial_defect", "holomorphy_gap"},
                                  out.report.records));
  out.summary = r.values;
  const auto& th = c.thresholds;
  if (th.count("curvature_error_max")) out.checks.push_back(make_check("curvature_error", m.curvature_error, "<=", th.at("curvature_error_max")));
  if (th.count("fd_order_min")) out.checks.push_back(make_check("fd_order", m.fd_order, ">=", th.at("fd_order_min")));
  if (th.count("fd_order_max")) out.checks.push_back(make_check("fd_order", m.fd_order, "<=", th.at("fd_order_max")));
  if (th.count("radial_defect_max")) out.checks.push_back(make_check("radial_defect", m.radial_defect, "<=", th.at("radial_defect_max")));
  if (th.count("holomorphy_gap_max")) out.checks.push_back(make_check("holomorphy_gap", m.holomorphy_gap, "<=", th.at("holomorphy_gap_max")));
}

struct Rung {
  int k;
  Chart chart;
  RadialGauge gauge;
  GridSection section;
};

Rung make_rung(const ExperimentConfig& c, std::size_t i, const BackendPtr& backend, const BallDomain& grid) {
  const int k = c.ladder[i];
  const SectionFamily family = make_family(c, k, backend);
  Chart chart = build_chart(backend, c.center_for(i), k);
  RadialGauge gauge = radial_gauge(chart, grid);
  GridSection s = renormalize_section(family, chart, gauge, grid);
  return {k, std::move(chart), std::move(gauge), std::move(s)};
}

void record_structure(DiagnosticsRecord& r, const Rung& rung, const BallDomain& grid, double subball) {
  const StructurePullback sp = pullback_structure(rung.chart, grid, subball);
  put(r, "metric_c0", sp.metric_deviation.c0);
  put(r, "metric_c1", sp.metric_deviation.c1);
  put(r, "omega_c0", sp.omega_deviation.c0);
  put(r, "j_c0", sp.j_deviation.c0);
  const ConnectionPullback cp = pullback_connection(rung.chart, rung.gauge, grid);
  put(r, "connection_deviation", cp.deviation);
  put(r, "connection_radial_defect", cp.radial_defect);
  put(r, "gauge_drift", rung.gauge.max_modulus_drift);
  r.tolerances["structure_subball"] = subball;
}

void run_renorm(Outcome& out) {
  const ExperimentConfig& c = out.config;
  const BackendPtr backend = make_backend(c);
  const BallDomain grid(backend->complex_dim(), c.grid.points, c.grid.radius);
  for (std::size_t i = 0; i < c.ladder.size(); ++i) {
    const Rung rung = make_rung(c, i, backend, grid);
    DiagnosticsRecord r = base_record(c, rung.k, grid);
    record_structure(r, rung, grid, c.diagnostics.subball);
    put(r, "sigma_c0", cm_norm(rung.section, 0, c.diagnostics.subball));
    out.report.records.push_back(std::move(r));
  }
  const std::vector<std::string> cols{"metric_c0", "metric_c1", "omega_c0", "j_c0", "connection_deviation",
                                      "connection_radial_defect", "gauge_drift", "sigma_c0"};
  out.tables.push_back(table_from(c.name + "_rungs", cols, out.report.records));
  auto worst = [&](const std::string& key) {
    double w = 0.0;
    for (const auto& r : out.report.records) w = std::max(w, lookup(r, key));
    return w;
  };
  for (const auto& key : {"metric_c0", "connection_deviation", "connection_radial_defect", "gauge_drift"}) {
    out.summary[std::string("max_") + key] = worst(key);
    const std::string t = std::string(key) + "_max";
    if (c.thresholds.count(t)) out.checks.push_back(make_check(key, worst(key), "<=", c.thresholds.at(t)));
  }
}

void run_sweep(Outcome& out) {
  const ExperimentConfig& c = out.config;
  const BackendPtr backend = make_backend(c);
  const BallDomain grid(backend->complex_dim(), c.grid.points, c.grid.radius);
  const DerivativeMode mode = c.diagnostics.dbar_mode == "analytic" ? DerivativeMode::analytic
                                                                     : DerivativeMode::finite_difference;
  std::vector<GridSection> sections;
  for (std::size_t i = 0; i < c.ladder.size(); ++i) {
    const Rung rung = make_rung(c, i, backend, grid);
    DiagnosticsRecord r = base_record(c, rung.k, grid);
    const GridSection measured = mode == DerivativeMode::finite_difference ? rung.section.sampled() : rung.section;
    put(r, "dbar_defect", dbar_defect(measured, c.diagnostics.subball, mode));
    put(r, "sigma_cm", cm_norm(rung.section, c.diagnostics.order, c.diagnostics.subball));
    record_transversality(r, c, rung.section);
    record_structure(r, rung, grid, c.diagnostics.subball);
    r.tolerances["subball"] = c.diagnostics.subball;
    r.tolerances["order"] = c.diagnostics.order;
    out.report.records.push_back(std::move(r));
    sections.push_back(rung.section);
  }
  const LimitCandidate lim = limit_extract(sections, c.ladder, c.diagnostics.order, c.diagnostics.subball);
  for (std::size_t i = 0; i < lim.distances.size(); ++i) {
    out.report.records[i].values["cm_distance_to_next"] = lim.distances[i];
  }
  const std::vector<std::string> cols{"cm_distance_to_next", "dbar_defect", "sigma_cm", "transversality_eta",
                                      "near_zero_nodes", "metric_c0", "metric_c1", "omega_c0", "j_c0",
                                      "connection_deviation", "connection_radial_defect", "gauge_drift"};
  out.tables.push_back(table_from(c.name + "_rungs", cols, out.report.records));

  const double first = lookup(out.report.records.front(), "dbar_defect");
  const double last = lookup(out.report.records.back(), "dbar_defect");
  const double ratio = first > 0.0 ? last / first : (last == 0.0 ? 0.0 : inf);
  std::vector<double> metric;
  for (const auto& r : out.report.records) metric.push_back(lookup(r, "metric_c0"));
  const bool flat = std::all_of(metric.begin(), metric.end(), [](double v) { return v <= 1e-10; });
  const double slope = flat ? std::numeric_limits<double>::quiet_NaN() : loglog_slope(c.ladder, metric);

  out.summary["cauchy"] = lim.cauchy ? 1.0 : 0.0;
  if (std::isfinite(ratio)) out.summary["dbar_ratio"] = ratio;
  if (std::isfinite(slope)) out.summary["metric_slope"] = slope;
  if (flat) out.notes.push_back("rescaled structure is flat to 1e-10 on every rung; no slope fitted");
  if (!lim.cauchy) out.notes.push_back("ladder is not Cauchy: C^m distances do not decrease");

  const auto& th = c.thresholds;
  if (th.count("require_cauchy") && th.at("require_cauchy") != 0.0) {
    out.checks.push_back(make_check("cauchy", lim.cauchy ? 1.0 : 0.0, "==", 1.0));
  }
  if (th.count("dbar_ratio_max")) out.checks.push_back(make_check("dbar_ratio", ratio, "<=", th.at("dbar_ratio_max")));
  if (th.count("metric_slope_min")) out.checks.push_back(make_check("metric_slope", slope, ">=", th.at("metric_slope_min")));
  if (th.count("metric_slope_max")) out.checks.push_back(make_check("metric_slope", slope, "<=", th.at("metric_slope_max")));
}

void run_zeroset(Outcome& out) {
  const ExperimentConfig& c = out.config;
  const BackendPtr backend = make_backend(c);
  const BallDomain grid(backend->complex_dim(), c.grid.points, c.grid.radius);
  double min_fraction = inf, min_symp = inf, min_eta = inf, u_min = inf, u_max = 0.0;
  bool symp_trivial = false;
  for (std::size_t i = 0; i < c.ladder.size(); ++i) {
    const Rung rung = make_rung(c, i, backend, grid);
    DiagnosticsRecord r = base_record(c, rung.k, grid);
    ZeroLocusOptions opts;
    opts.tolerance = c.diagnostics.zero_tolerance;
    r.tolerances["zero_tolerance"] = opts.tolerance;
    const ZeroLocus locus = zero_locus(rung.section, opts);
    r.values["seeds"] = static_cast<double>(locus.seeds);
    r.values["converged"] = static_cast<double>(locus.converged);
    r.values["nonconvergent"] = static_cast<double>(locus.nonconvergent);
    r.values["trimmed"] = static_cast<double>(locus.trimmed);
    r.values["locus_points"] = static_cast<double>(locus.points.size());
    r.values["converged_fraction"] = locus.converged_fraction();
    double max_res = 0.0;
    std::size_t degenerate = 0;
    for (std::size_t p = 0; p < locus.points.size(); ++p) {
      max_res = std::max(max_res, locus.residuals[p]);
      if (locus.degenerate[p]) ++degenerate;
    }
    r.values["max_residual"] = max_res;
    r.values["degenerate_points"] = static_cast<double>(degenerate);
    min_fraction = std::min(min_fraction, locus.converged_fraction());

    const StructurePullback sp = pullback_structure(rung.chart, grid, c.diagnostics.subball);
    const MarginResult symp = symplectic_margin(locus, sp.omega);
    if (symp.trivial) {
      symp_trivial = true;
      r.flags.push_back("symplectic margin: n = 1, zero set is 0-dimensional (trivially symplectic)");
    } else {
      put(r, "symplectic_margin", symp.value, "symplectic margin: empty locus");
      min_symp = std::min(min_symp, symp.value);
    }
    const MarginResult curv = curvature_estimate(locus, rung.section);
    if (curv.trivial) {
      r.flags.push_back("curvature: n = 1, not computed");
    } else if (locus.points.size() > curv.excluded) {
      r.values["curvature_u"] = curv.value;
      u_min = std::min(u_min, curv.value);
      u_max = std::max(u_max, curv.value);
    }
    record_transversality(r, c, rung.section);
    min_eta = std::min(min_eta, r.values.count("transversality_eta") ? r.values.at("transversality_eta") : inf);
    out.report.records.push_back(std::move(r));
  }
  const std::vector<std::string> cols{"seeds", "converged", "nonconvergent", "trimmed", "locus_points",
                                      "converged_fraction", "max_residual", "degenerate_points",
                                      "symplectic_margin", "curvature_u", "transversality_eta", "near_zero_nodes"};
  out.tables.push_back(table_from(c.name + "_rungs", cols, out.report.records));

  const double ratio = u_min > 0.0 && std::isfinite(u_min) ? u_max / u_min : inf;
  out.summary["min_converged_fraction"] = min_fraction;
  if (std::isfinite(min_symp)) out.summary["min_symplectic_margin"] = min_symp;
  if (std::isfinite(min_eta)) out.summary["min_transversality_eta"] = min_eta;
  if (std::isfinite(ratio)) out.summary["curvature_ratio"] = ratio;

  const auto& th = c.thresholds;
  if (th.count("converged_fraction_min")) out.checks.push_back(make_check("converged_fraction", min_fraction, ">=", th.at("converged_fraction_min")));
  if (th.count("symplectic_margin_min") && !symp_trivial) out.checks.push_back(make_check("symplectic_margin", min_symp, ">", th.at("symplectic_margin_min")));
  if (th.count("transversality_min")) out.checks.push_back(make_check("transversality_eta", min_eta, ">", th.at("transversality_min")));
  if (th.count("curvature_ratio_max")) out.checks.push_back(make_check("curvature_ratio", ratio, "<=", th.at("curvature_ratio_max")));
}

}  // namespace

bool Outcome::passed() const {
  if (numeric_error) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

int Outcome::exit_code() const {
  if (numeric_error) return 3;
  return passed() ? 0 : 1;
}

BackendPtr make_backend(const ExperimentConfig& c) {
  if (c.backend.kind == "torus") return torus_backend(c.backend.n);
  if (c.backend.kind == "cp1") return cp1_backend();
  throw InvalidArgument("make_backend: command needs a backend");
}

SectionFamily make_family(const ExperimentConfig& c, int k, const BackendPtr& backend) {
  const auto& f = c.family;
  if (f.kind == "theta") return theta_section(k, f.j, backend);
  if (f.kind == "theta-limit") return theta_combination_section(theta_profile(k, profile_for_limit(f.limit)), backend);
  if (f.kind == "product-limit") return torus_product_for_limit(k, f.terms, backend);
  if (f.kind == "cp1-limit") return cp1_section(k, cp1_coefficients_for_limit(k, f.limit), backend);
  if (f.kind == "cp1") return cp1_section(k, f.coefficients, backend);
  throw InvalidArgument("make_family: unknown family '" + f.kind + "'");
}

double loglog_slope(const std::vector<int>& ks, const std::vector<double>& values) {
  if (ks.size() != values.size() || ks.size() < 2) throw InvalidArgument("loglog_slope: need matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double x = std::log(static_cast<double>(ks[i]));
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ModelCheckResult model_check(const ExperimentConfig& c) {
  ModelCheckResult out;
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> coord(-0.6, 0.6);

  for (int n : {1, 2}) {
    const ConnectionField a = model_connection_field(n);
    const RMat expected = standard_symplectic(n);
    for (int s = 0; s < 8; ++s) {
      RVec z(2 * n);
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = coord(rng);
      const CMat f = curvature_of(a, z, DerivativeMode::analytic, 0.0);
      out.curvature_error = std::max(out.curvature_error, (f - (-2.0 * pi * I) * expected.cast<cplx>()).cwiseAbs().maxCoeff());
    }
  }

  const ConnectionField gauged = gauge_changed_connection(1);
  RVec z0(2);
  z0 << 0.31, -0.27;
  const CMat exact = (-2.0 * pi * I) * standard_symplectic(1).cast<cplx>();
  out.fd_error_coarse = (curvature_of(gauged, z0, DerivativeMode::finite_difference, 0.02) - exact).cwiseAbs().maxCoeff();
  out.fd_error_fine = (curvature_of(gauged, z0, DerivativeMode::finite_difference, 0.01) - exact).cwiseAbs().maxCoeff();
  out.fd_order = std::log2(out.fd_error_coarse / out.fd_error_fine);

  const BallDomain d1(1, c.grid.points, c.grid.radius);
  const BallDomain d2(2, std::min(c.grid.points, 9), c.grid.radius);
  out.radial_defect = std::max(radial_flatness_defect(model_connection_field(1, d1)),
                               radial_flatness_defect(model_connection_field(2, d2)));

  for (int p = 0; p < 20; ++p) {
    const int n = p < 10 ? 1 : 2;
    const BallDomain& d = n == 1 ? d1 : d2;
    const GridSection s = polynomial_section(random_polynomial(n, rng), d);
    const GridSection u = unweight(s);
    for (std::size_t node : d.ball_nodes()) {
      const RVec z = d.node_point(node);
      const CVec cov = dbar_operator(s, z, DerivativeMode::analytic);
      const CVec ord = ordinary_dbar(u, z, DerivativeMode::analytic) * gaussian_weight(z);
      out.holomorphy_gap = std::max(out.holomorphy_gap, (cov - ord).norm());
    }
    ++out.polynomials;
  }
  return out;
}

Outcome execute(const ExperimentConfig& config) {
  Outcome out;
  out.config = config;
  try {
    if (config.command == "model-check") run_model_check(out);
    else if (config.command == "renorm") run_renorm(out);
    else if (config.command == "sweep") run_sweep(out);
    else if (config.command == "zeroset") run_zeroset(out);
    else throw InvalidArgument("unknown command " + config.command);
    if (!out.report.all_finite()) throw NonFiniteValue("report contains non-finite values");
  } catch (const bargmann::Error& e) {
    out.numeric_error = e.what();
  }
  return out;
}

}  // namespace bargmann::experiment
