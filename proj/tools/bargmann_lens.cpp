// bargmann-lens: renormalization experiments on prequantized Kahler manifolds.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bargmann/experiment/config.hpp"
#include "bargmann/experiment/report.hpp"
#include "bargmann/experiment/runner.hpp"
#include "bargmann/parallel.hpp"

namespace ex = bargmann::experiment;

namespace {

struct Options {
  std::string config;
  std::string preset;
  std::string out = "out";
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::string ladder, center, grid;
  std::optional<double> epsilon;
  std::vector<std::string> inputs;
};

void add_shared(CLI::App* app, Options& o) {
  app->add_option("--config", o.config, "YAML experiment configuration");
  app->add_option("--preset", o.preset, "built-in configuration (model-check, torus1-ladder, cp1-ladder, "
                                        "torus2-prop1, torus2-ladder)");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--threads", o.threads, "worker threads (default: BARGMANN_LENS_THREADS or all cores)");
  app->add_option("--seed", o.seed, "seed for randomized selections");
  app->add_option("--k-ladder", o.ladder, "comma-separated powers, e.g. 4,16,64");
  app->add_option("--center", o.center, "comma-separated chart center coordinates");
  app->add_option("--grid", o.grid, "points per axis, optionally followed by ,radius");
  app->add_option("--epsilon", o.epsilon, "absolute smallness threshold for transversality");
}

int threads_from(const Options& o) {
  if (o.threads) return *o.threads;
  if (const char* env = std::getenv("BARGMANN_LENS_THREADS")) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      throw ex::ConfigError("BARGMANN_LENS_THREADS must be an integer");
    }
  }
  return 0;
}

ex::ExperimentConfig resolve(const std::string& command, const Options& o) {
  if (!o.config.empty() && !o.preset.empty()) throw ex::ConfigError("give either --config or --preset");
  ex::ExperimentConfig c;
  if (!o.config.empty()) {
    c = ex::load_config(o.config);
  } else if (!o.preset.empty()) {
    c = ex::preset(o.preset);
  } else if (command == "model-check") {
    c = ex::preset("model-check");
  } else {
    throw ex::ConfigError(command + " needs --config or --preset");
  }
  if (c.command != command) {
    throw ex::ConfigError("configuration is for '" + c.command + "', not '" + command + "'");
  }
  ex::Overrides ov;
  ov.seed = o.seed;
  ov.epsilon = o.epsilon;
  if (!o.ladder.empty()) ov.ladder = ex::parse_int_list(o.ladder);
  if (!o.center.empty()) {
    const auto v = ex::parse_double_list(o.center);
    ov.center = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  if (!o.grid.empty()) {
    const auto v = ex::parse_double_list(o.grid);
    if (v.size() > 2 || v[0] != static_cast<int>(v[0])) throw ex::ConfigError("--grid is points[,radius]");
    ex::GridSpec g = c.grid;
    g.points = static_cast<int>(v[0]);
    if (v.size() == 2) g.radius = v[1];
    ov.grid = g;
  }
  ex::apply(c, ov);
  ex::validate(c);
  const int threads = threads_from(o);
  if (threads < 0) throw ex::ConfigError("thread count must be non-negative");
  bargmann::set_thread_count(threads);
  return c;
}

int run_command(const std::string& command, const Options& o) {
  ex::ExperimentConfig config;
  try {
    config = resolve(command, o);
  } catch (const ex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  const ex::Outcome outcome = ex::execute(config);
  ex::write_outputs(outcome, o.out);
  for (const auto& c : outcome.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value << " (" << c.relation << " "
              << c.threshold << ")\n";
  }
  for (const auto& n : outcome.notes) std::cout << "note: " << n << "\n";
  if (outcome.numeric_error) std::cerr << "numeric failure: " << *outcome.numeric_error << "\n";
  std::cout << "status " << outcome.exit_code() << ", outputs in " << o.out << "\n";
  return outcome.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renormalization laboratory for sections of L^k (Bargmann-Fock limits)"};
  app.require_subcommand(1);
  Options opts;
  const char* names[] = {"model-check", "renorm", "sweep", "zeroset"};
  const char* help[] = {"model bundle identities", "one renormalization with structure/connection deviations",
                        "k-ladder with limit extraction, dbar defects and transversality",
                        "zero locus, symplectic margin and curvature estimate"};
  for (int i = 0; i < 4; ++i) add_shared(app.add_subcommand(names[i], help[i]), opts);
  auto* report = app.add_subcommand("report", "merge prior outputs into a summary table");
  report->add_option("--out", opts.out, "output directory");
  report->add_option("inputs", opts.inputs, "report files or directories to scan");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (command == "report") {
    std::vector<std::filesystem::path> inputs(opts.inputs.begin(), opts.inputs.end());
    const std::size_t count = ex::merge_reports(inputs, opts.out);
    std::cout << "merged " << count << " reports into " << opts.out << "\n";
    return 0;
  }
  return run_command(command, opts);
}
