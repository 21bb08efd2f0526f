#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bargmann/backends.hpp"
#include "bargmann/diagnostics.hpp"
#include "bargmann/experiment/config.hpp"

namespace bargmann::experiment {

struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  ///< "<=", ">=", "<", ">", "=="
  double threshold = 0.0;
  bool pass = false;
};

/// Numeric CSV table; non-finite cells are written empty.
struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct Outcome {
  ExperimentConfig config;
  DiagnosticsReport report;
  std::vector<Check> checks;
  std::vector<Table> tables;
  std::map<std::string, double> summary;
  std::vector<std::string> notes;
  std::optional<std::string> numeric_error;

  bool passed() const;
  /// 0 all checks pass, 1 some check fails, 3 numeric failure.
  int exit_code() const;
};

/// Runs a validated configuration. Library errors raised by the pipeline are
/// captured in numeric_error together with everything computed before them.
Outcome execute(const ExperimentConfig& config);

struct ModelCheckResult {
  double curvature_error = 0.0;  ///< analytic, n = 1 and 2
  double fd_error_coarse = 0.0;
  double fd_error_fine = 0.0;
  double fd_order = 0.0;
  double radial_defect = 0.0;
  double holomorphy_gap = 0.0;
  int polynomials = 0;
};

ModelCheckResult model_check(const ExperimentConfig& config);

BackendPtr make_backend(const ExperimentConfig& config);
SectionFamily make_family(const ExperimentConfig& config, int k, const BackendPtr& backend);

/// Least-squares slope of log(values) against log(ks).
double loglog_slope(const std::vector<int>& ks, const std::vector<double>& values);

}  // namespace bargmann::experiment
