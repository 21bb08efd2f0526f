#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bargmann/theta.hpp"
#include "bargmann/types.hpp"

namespace bargmann::experiment {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BackendSpec {
  std::string kind = "torus";  ///< torus | cp1 | none
  int n = 1;
};

/// theta:          theta_{k,j}                      (torus, n = 1)
/// theta-limit:    profile combination for `limit`  (torus, n = 1)
/// product-limit:  sums of products for `terms`     (torus, n = 2)
/// cp1-limit:      P_k(w) = limit(w sqrt(k/pi))     (cp1)
/// cp1:            fixed coefficients              (cp1)
struct FamilySpec {
  std::string kind = "theta";
  int j = 0;
  std::vector<cplx> limit;
  std::vector<cplx> coefficients;
  std::vector<LimitProduct> terms;
};

struct GridSpec {
  int points = 129;
  double radius = 0.9;
};

struct DiagnosticSpec {
  int order = 1;
  double subball = 0.5;
  double epsilon_fraction = 0.1;
  std::optional<double> epsilon;  ///< absolute; overrides the fraction
  std::string dbar_mode = "finite-difference";  ///< or analytic
  double zero_tolerance = 1e-10;
};

struct ExperimentConfig {
  std::string command = "sweep";  ///< model-check | renorm | sweep | zeroset
  std::string name = "experiment";
  std::uint64_t seed = 1;
  BackendSpec backend;
  FamilySpec family;
  std::vector<int> ladder{4, 16, 64};
  std::vector<RVec> centers;  ///< one shared center or one per rung
  GridSpec grid;
  DiagnosticSpec diagnostics;
  /// Acceptance thresholds; a check is run for every key present.
  std::map<std::string, double> thresholds;

  RVec center_for(std::size_t rung) const;
};

/// Command-line overrides applied after the file or preset.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<int>> ladder;
  std::optional<RVec> center;
  std::optional<GridSpec> grid;
  std::optional<double> epsilon;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

void apply(ExperimentConfig& config, const Overrides& overrides);

/// Throws ConfigError with a readable message.
void validate(const ExperimentConfig& config);

/// Canonical YAML with every default materialized.
std::string to_yaml(const ExperimentConfig& config);

std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace bargmann::experiment
