// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only
//
// Exit status is 0 iff every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bargmann/diagnostics.hpp"
#include "bargmann/experiment/config.hpp"
#include "bargmann/experiment/report.hpp"
#include "bargmann/experiment/runner.hpp"
#include "bargmann/parallel.hpp"
#include "bargmann/renormalize.hpp"
#include "support.hpp"

using namespace bargmann;
namespace ex = bargmann::experiment;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void clause(bool ok, const std::string& text) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += text + (ok ? " [ok]" : " [violated]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double check_value(const ex::Outcome& o, const std::string& name) {
  for (const auto& c : o.checks) {
    if (c.name == name) return c.value;
  }
  return NAN;
}

Verdict ac1() {
  const ex::ModelCheckResult m = ex::model_check(ex::preset("model-check"));
  Verdict v;
  v.clause(m.curvature_error <= 1e-12, "analytic curvature error " + fmt("%.2e", m.curvature_error) + " <= 1e-12");
  v.clause(m.fd_order >= 1.8 && m.fd_order <= 2.2, "FD order " + fmt("%.4f", m.fd_order) + " in [1.8, 2.2]");
  v.clause(m.radial_defect <= 1e-12, "radial flatness defect " + fmt("%.2e", m.radial_defect) + " <= 1e-12");
  return v;
}

Verdict ac2() {
  const ex::ModelCheckResult m = ex::model_check(ex::preset("model-check"));
  Verdict v;
  v.clause(m.polynomials >= 20, std::to_string(m.polynomials) + " random polynomial sections");
  v.clause(m.holomorphy_gap <= 1e-8, "holomorphy gap " + fmt("%.2e", m.holomorphy_gap) + " <= 1e-8");
  return v;
}

Verdict ac3() {
  const ex::Outcome o = ex::execute(ex::preset("torus1-ladder"));
  Verdict v;
  if (o.numeric_error) {
    v.clause(false, "numeric failure: " + *o.numeric_error);
    return v;
  }
  std::string dists;
  for (const auto& r : o.report.records) {
    if (r.values.count("cm_distance_to_next")) {
      dists += (dists.empty() ? "" : ", ") + fmt("%.3e", r.values.at("cm_distance_to_next"));
    }
  }
  v.clause(o.summary.at("cauchy") == 1.0, "C1 rung distances strictly decreasing (" + dists + ")");
  const double ratio = o.summary.count("dbar_ratio") ? o.summary.at("dbar_ratio") : NAN;
  v.clause(ratio <= 0.5, "candidate/first-rung FD dbar defect " + fmt("%.5f", ratio) + " <= 0.5");
  return v;
}

Verdict ac4() {
  Verdict v;
  double worst = 0.0;
  for (int n : {1, 2}) {
    ex::ExperimentConfig c = ex::preset("torus1-ladder");
    c.command = "renorm";
    c.name = "torus-structure";
    c.backend.n = n;
    c.grid = {n == 1 ? 129 : 17, 0.9};
    c.centers = {n == 1 ? (RVec(2) << 0.37, -0.21).finished() : (RVec(4) << 0.37, -0.21, 0.1, 0.6).finished()};
    c.family.kind = n == 1 ? "theta" : "product-limit";
    c.family.terms = {{1.0, {0.0, 1.0}, {1.0}}};
    c.thresholds.clear();
    ex::validate(c);
    const ex::Outcome o = ex::execute(c);
    if (o.numeric_error) {
      v.clause(false, "numeric failure: " + *o.numeric_error);
      return v;
    }
    for (const auto& r : o.report.records) {
      for (const char* key : {"metric_c0", "metric_c1", "omega_c0", "j_c0", "connection_deviation"}) {
        worst = std::max(worst, r.values.at(key));
      }
    }
  }
  v.clause(worst <= 1e-10, "torus structure/connection deviations " + fmt("%.2e", worst) + " <= 1e-10");
  const ex::Outcome cp = ex::execute(ex::preset("cp1-ladder"));
  const double slope = cp.summary.count("metric_slope") ? cp.summary.at("metric_slope") : NAN;
  v.clause(slope >= -1.3 && slope <= -0.7, "cp1 C0 metric deviation slope " + fmt("%.4f", slope) + " in [-1.3, -0.7]");
  return v;
}

Verdict ac5() {
  const ex::Outcome o = ex::execute(ex::preset("torus2-prop1"));
  Verdict v;
  if (o.numeric_error) {
    v.clause(false, "numeric failure: " + *o.numeric_error);
    return v;
  }
  const double frac = check_value(o, "converged_fraction");
  const double symp = check_value(o, "symplectic_margin");
  const double eta = check_value(o, "transversality_eta");
  v.clause(frac >= 0.95, "converged seed fraction " + fmt("%.4f", frac) + " >= 0.95");
  v.clause(symp > 0.5, "symplectic margin " + fmt("%.6f", symp) + " > 0.5");
  v.clause(eta > 0.0, "transversality margin " + fmt("%.4f", eta) + " > 0 at eps = 0.1 max|sigma|");
  return v;
}

Verdict ac6() {
  const ex::Outcome o = ex::execute(ex::preset("torus2-ladder"));
  Verdict v;
  if (o.numeric_error) {
    v.clause(false, "numeric failure: " + *o.numeric_error);
    return v;
  }
  std::string us;
  for (const auto& r : o.report.records) {
    if (r.values.count("curvature_u")) {
      us += (us.empty() ? "" : ", ") + ("u_" + std::to_string(r.k) + " = ") + fmt("%.3f", r.values.at("curvature_u"));
    }
  }
  const double ratio = check_value(o, "curvature_ratio");
  v.clause(ratio <= 3.0, "max/min curvature supremum " + fmt("%.3f", ratio) + " <= 3 (" + us + ")");
  return v;
}

Verdict ac7() {
  Verdict v;
  const BallDomain d(2, 17, 1.0);
  const GridSection s = bargmann_section(PolyTable(2).add({1, 0}, 1.0), d);
  const ZeroLocus z = zero_locus(s);
  const double h = d.spacing();
  const support::Hausdorff hd = support::hausdorff_to_z2_plane(z.points, 1.0 - 2.0 * h, h / 4);
  v.clause(!z.points.empty() && hd.value() <= 2.0 * h,
           "Hausdorff " + fmt("%.4f", hd.value()) + " <= 2h = " + fmt("%.4f", 2.0 * h));

  const double R = 0.5;
  const GridSection sphere = GridSection::sample(BallDomain(2, 33, 1.0), support::sphere_section(R, true));
  const double K = curvature_estimate(zero_locus(sphere), sphere).value;
  v.clause(std::abs(K * R * R - 1.0) <= 0.05, "sphere curvature " + fmt("%.5f", K) + " within 5% of 1/R^2 = 4");

  std::string counts;
  bool ok = true;
  for (int k : {4, 8, 16}) {
    for (int j : {0, k / 2 + 1}) {
      const int c = support::theta_zero_count(k, j);
      ok = ok && c == k;
      counts += (counts.empty() ? "" : ", ") + std::to_string(c);
    }
  }
  v.clause(ok, "theta zero counts (" + counts + ") equal k for k in {4, 8, 16}");
  return v;
}

std::vector<std::pair<std::string, std::string>> snapshot(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files.emplace_back(e.path().filename().string(), ss.str());
  }
  std::sort(files.begin(), files.end());
  return files;
}

Verdict ac8() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "bargmann_acceptance_determinism";
  std::vector<ex::ExperimentConfig> configs{ex::preset("torus1-ladder"), ex::preset("cp1-ladder")};
  configs[1].grid.points = 65;
  for (const auto& c : configs) {
    std::vector<std::vector<std::pair<std::string, std::string>>> runs;
    for (int threads : {1, 4, 1, 4}) {
      set_thread_count(threads);
      const fs::path dir = root / (c.name + "_" + std::to_string(runs.size()));
      fs::remove_all(dir);
      ex::write_outputs(ex::execute(c), dir);
      runs.push_back(snapshot(dir));
    }
    set_thread_count(0);
    bool same = true;
    for (const auto& r : runs) same = same && r == runs.front();
    v.clause(same, c.name + ": 4 runs (threads 1, 4, 1, 4) byte-identical over " +
                       std::to_string(runs.front().size()) + " files");
  }
  fs::remove_all(root);
  return v;
}

struct Criterion {
  const char* title;
  double budget_seconds;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"model identities", 5, ac1},
      {"holomorphy equivalence", 10, ac2},
      {"torus theta ladder: Cauchy rungs, holomorphic limit", 120, ac3},
      {"rescaled structure convergence", 300, ac4},
      {"zero locus of an n = 2 torus section", 600, ac5},
      {"curvature of zero sets across the ladder", 900, ac6},
      {"oracle equivalence", 60, ac7},
      {"determinism across thread counts", 120, ac8},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "criterion must be in 1..%zu\n", criteria.size());
    return 2;
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && only != static_cast<int>(i + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].run();
    } catch (const std::exception& e) {
      v.clause(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.clause(secs < criteria[i].budget_seconds,
             "runtime " + fmt("%.1f", secs) + " s < " + fmt("%.0f", criteria[i].budget_seconds) + " s");
    std::printf("AC%zu %s: %s: %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].title, v.detail.c_str());
    std::fflush(stdout);
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
