#include "dmnls/io.hpp"

#include <bit>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dmnls {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
    out += "\n";
  }
  return out;
}

std::string diagnostics_csv(const DiagnosticsTimeSeries& series) {
  std::vector<std::vector<double>> rows;
  rows.reserve(series.rows.size());
  for (const auto& r : series.rows) rows.push_back(DiagnosticsTimeSeries::row_values(r));
  return csv_table(DiagnosticsTimeSeries::column_names(), rows);
}

void write_text(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_json(const std::string& path, const nlohmann::json& value) { write_text(path, value.dump(2) + "\n"); }

namespace {

constexpr char kMagic[8] = {'D', 'M', 'N', 'L', 'S', 'C', 'K', '\0'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::string& buf, T v) {
  char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  buf.append(raw, sizeof(T));
}

template <class T>
T take(const std::string& buf, std::size_t& pos) {
  if (pos + sizeof(T) > buf.size()) throw std::runtime_error("checkpoint file truncated");
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const ComplexField& field, double t) {
  const Grid& g = *field.grid;
  std::string buf(kMagic, sizeof kMagic);
  put<std::uint32_t>(buf, kVersion);
  put<std::uint32_t>(buf, 0);
  put<std::int32_t>(buf, g.dimension());
  put<std::int32_t>(buf, g.points_per_axis());
  put<double>(buf, g.box_length());
  put<double>(buf, t);
  for (const auto& z : field.values) {
    put<double>(buf, z.real());
    put<double>(buf, z.imag());
  }
  write_text(path, buf);
}

StoredField read_checkpoint(const std::string& path) {
  const std::string buf = read_text(path);
  if (buf.size() < 16 || std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0)
    throw std::runtime_error(path + ": not a checkpoint file");
  std::size_t pos = 8;
  const auto version = take<std::uint32_t>(buf, pos);
  if (version != kVersion) throw std::runtime_error(path + ": unsupported checkpoint version");
  take<std::uint32_t>(buf, pos);
  const int dim = take<std::int32_t>(buf, pos);
  const int n = take<std::int32_t>(buf, pos);
  const double length = take<double>(buf, pos);
  StoredField out;
  out.t = take<double>(buf, pos);
  const GridPtr grid = make_grid(dim, n, length);
  if (buf.size() - pos != grid->size() * 16) throw std::runtime_error(path + ": payload size mismatch");
  out.field = ComplexField(grid);
  for (auto& z : out.field.values) {
    const double re = take<double>(buf, pos);
    const double im = take<double>(buf, pos);
    z = {re, im};
  }
  return out;
}

nlohmann::json RunManifest::to_json() const {
  return {{"config_hash", config_hash}, {"code_version", code_version}, {"preset", preset},
          {"start_time", start_time},   {"end_time", end_time},         {"status", status},
          {"failed_stage", failed_stage}, {"message", message},         {"files", files},
          {"config", config_echo}};
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace dmnls
