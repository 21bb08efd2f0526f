#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bargmann/experiment/runner.hpp"

#include "json.hpp"

namespace bargmann::experiment {

nlohmann::ordered_json to_json(const Outcome& outcome);
std::string to_csv(const Table& table);
std::string sha256_hex(const std::string& data);

/// Writes report.json, one CSV per table and manifest.json (artifact list,
/// SHA-256 of the materialized configuration, seed). Returns artifact names.
std::vector<std::string> write_outputs(const Outcome& outcome, const std::filesystem::path& out_dir);

/// Collects report.json files found under the inputs (files or directories)
/// into out_dir/summary.csv and out_dir/summary.json. Returns the count.
std::size_t merge_reports(const std::vector<std::filesystem::path>& inputs, const std::filesystem::path& out_dir);

}  // namespace bargmann::experiment
