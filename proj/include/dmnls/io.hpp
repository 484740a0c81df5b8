#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dmnls/diagnostics.hpp"
#include "dmnls/grid.hpp"

namespace dmnls {

/// printf("%.17g"): lossless text form of a double.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

/// CSV text: a header row of column names, then one row per checkpoint.
std::string diagnostics_csv(const DiagnosticsTimeSeries& series);
/// Generic CSV with the same number formatting.
std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& value);

struct StoredField {
  double t = 0.0;
  ComplexField field;
};

/// Binary layout: 8-byte magic "DMNLSCK\0", uint32 version, uint32 reserved,
/// then int32 dimension, int32 points per axis, float64 box length, float64 t,
/// and n^d little-endian (re, im) float64 pairs in row-major order.
void write_checkpoint(const std::string& path, const ComplexField& field, double t);
StoredField read_checkpoint(const std::string& path);

struct RunManifest {
  std::string config_hash;
  std::string code_version;
  std::string preset;
  std::string start_time;
  std::string end_time;
  std::string status;  // "pass", "check_failed", "runtime_error"
  std::string failed_stage;
  std::string message;
  std::vector<std::string> files;
  std::string config_echo;

  nlohmann::json to_json() const;
};

/// UTC wall clock in ISO 8601.
std::string utc_timestamp();

}  // namespace dmnls
