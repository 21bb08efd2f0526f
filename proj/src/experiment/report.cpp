#include "bargmann/experiment/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <openssl/evp.h>

namespace bargmann::experiment {

namespace fs = std::filesystem;

namespace {

std::string format_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::ordered_json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

nlohmann::ordered_json to_json(const Outcome& o) {
  using json = nlohmann::ordered_json;
  json j;
  j["tool"] = "bargmann-lens";
  j["command"] = o.config.command;
  j["name"] = o.config.name;
  j["seed"] = o.config.seed;
  j["status"] = o.numeric_error ? "numeric_failure" : (o.passed() ? "pass" : "fail");
  j["exit_code"] = o.exit_code();
  if (o.numeric_error) j["error"] = *o.numeric_error;
  j["config_yaml"] = to_yaml(o.config);
  json checks = json::array();
  for (const auto& c : o.checks) {
    checks.push_back({{"name", c.name},
                      {"value", finite_or_null(c.value)},
                      {"relation", c.relation},
                      {"threshold", c.threshold},
                      {"pass", c.pass}});
  }
  j["checks"] = checks;
  json summary = json::object();
  for (const auto& [k, v] : o.summary) summary[k] = finite_or_null(v);
  j["summary"] = summary;
  json records = json::array();
  for (const auto& r : o.report.records) {
    json values = json::object();
    for (const auto& [k, v] : r.values) values[k] = finite_or_null(v);
    json tolerances = json::object();
    for (const auto& [k, v] : r.tolerances) tolerances[k] = v;
    records.push_back({{"experiment", r.experiment},
                       {"k", r.k},
                       {"grid", {{"points_per_axis", r.points_per_axis}, {"radius", r.radius}, {"spacing", r.spacing}}},
                       {"values", values},
                       {"tolerances", tolerances},
                       {"flags", r.flags}});
  }
  j["records"] = records;
  j["notes"] = o.notes;
  return j;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + csv_escape(t.header[i]);
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += "\n";
  }
  return out;
}

std::vector<std::string> write_outputs(const Outcome& o, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<std::string> artifacts;
  write_file(out_dir / "report.json", to_json(o).dump(2) + "\n");
  artifacts.push_back("report.json");
  for (const auto& t : o.tables) {
    const std::string name = t.name + ".csv";
    write_file(out_dir / name, to_csv(t));
    artifacts.push_back(name);
  }
  nlohmann::ordered_json manifest;
  manifest["tool"] = "bargmann-lens";
  manifest["command"] = o.config.command;
  manifest["seed"] = o.config.seed;
  manifest["config_sha256"] = sha256_hex(to_yaml(o.config));
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& a : artifacts) {
    std::ifstream in(out_dir / a, std::ios::binary);
    const std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    files.push_back({{"path", a}, {"sha256", sha256_hex(body)}});
  }
  manifest["artifacts"] = files;
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  artifacts.push_back("manifest.json");
  return artifacts;
}

std::size_t merge_reports(const std::vector<fs::path>& inputs, const fs::path& out_dir) {
  std::vector<fs::path> reports;
  for (const auto& in : inputs) {
    if (fs::is_regular_file(in)) {
      reports.push_back(in);
    } else if (fs::is_directory(in)) {
      for (const auto& e : fs::recursive_directory_iterator(in)) {
        if (e.is_regular_file() && e.path().filename() == "report.json") reports.push_back(e.path());
      }
    }
  }
  std::sort(reports.begin(), reports.end());
  const fs::path own = fs::weakly_canonical(out_dir / "summary.json");
  reports.erase(std::remove_if(reports.begin(), reports.end(),
                               [&](const fs::path& p) { return fs::weakly_canonical(p) == own; }),
                reports.end());

  using json = nlohmann::ordered_json;
  json merged = json::array();
  std::set<std::string> keys;
  std::vector<json> loaded;
  for (const auto& p : reports) {
    std::ifstream in(p);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("command") || !j.contains("summary") || !j["summary"].is_object()) continue;
    for (const auto& [k, v] : j["summary"].items()) keys.insert(k);
    loaded.push_back(j);
  }
  std::string csv = "name,command,seed,status";
  for (const auto& k : keys) csv += "," + k;
  csv += "\n";
  for (const auto& j : loaded) {
    csv += csv_escape(j.value("name", "")) + "," + j.value("command", "") + "," +
           std::to_string(j.value("seed", std::uint64_t{0})) + "," + j.value("status", "");
    for (const auto& k : keys) {
      csv += ",";
      if (j["summary"].contains(k) && j["summary"][k].is_number()) csv += format_number(j["summary"][k].get<double>());
    }
    csv += "\n";
    merged.push_back({{"name", j.value("name", "")},
                      {"command", j.value("command", "")},
                      {"seed", j.value("seed", std::uint64_t{0})},
                      {"status", j.value("status", "")},
                      {"summary", j["summary"]}});
  }
  fs::create_directories(out_dir);
  write_file(out_dir / "summary.csv", csv);
  write_file(out_dir / "summary.json", json{{"tool", "bargmann-lens"}, {"reports", merged}}.dump(2) + "\n");
  return loaded.size();
}

}  // namespace bargmann::experiment
