#pragma once

// Output plumbing for experiments: CSV rows with stable formatting and a
// JSON run manifest.  Data files are byte-identical across reruns of the
// same (config, seed); wall-clock fields live only in the manifest.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "irswalk/rng.hpp"

namespace irswalk {

using CsvValue = std::variant<std::int64_t, double, std::string>;

inline std::string csv_format(const CsvValue& v) {
  if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
  if (std::holds_alternative<double>(v)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", std::get<double>(v));
    return buf;
  }
  return std::get<std::string>(v);
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    for (std::size_t i = 0; i < columns.size(); ++i)
      out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
    width_ = columns.size();
  }

  void row(const std::vector<CsvValue>& values) {
    if (values.size() != width_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << (i ? "," : "") << csv_format(values[i]);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
  std::size_t width_;
};

struct RunManifest {
  std::string experiment;
  std::map<std::string, CsvValue> config;
  std::uint64_t seed = 0;
  std::string version;
  std::string started;  // ISO 8601, the only wall-clock field
  double elapsed_seconds = 0.0;
  std::map<std::string, CsvValue> results_summary;
};

inline std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::uint64_t config_hash(const std::map<std::string, CsvValue>& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : config) {
    for (char c : k + "=" + csv_format(v) + ";") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

inline void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::json j;
  j["experiment"] = m.experiment;
  nlohmann::json cfg;
  for (const auto& [k, v] : m.config)
    std::visit([&](const auto& x) { cfg[k] = x; }, v);
  j["config"] = cfg;
  j["config_hash"] = config_hash(m.config);
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["started"] = m.started;
  j["elapsed"] = m.elapsed_seconds;
  nlohmann::json rs;
  for (const auto& [k, v] : m.results_summary)
    std::visit([&](const auto& x) { rs[k] = x; }, v);
  j["results_summary"] = rs;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open manifest file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace irswalk
