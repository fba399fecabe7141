#include "hjb/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hjb {

namespace fs = std::filesystem;

bool RunReport::all_pass() const {
  for (const auto& e : ledger)
    if (!e.pass) return false;
  return true;
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
  const std::string text = cfg.canonical_text();
  unsigned long long hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", hash);
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + tmp.string());
    out << content;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::Io, "cannot rename into " + path.string());
}

} // namespace

void emit_report(const RunReport& report, const ExperimentConfig& cfg,
                 const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + dir);

  bool want_csv = false, want_json = false, want_plot = false;
  for (OutputFormat f : cfg.formats) {
    want_csv |= f == OutputFormat::Csv;
    want_json |= f == OutputFormat::Json;
    want_plot |= f == OutputFormat::PlotData;
  }

  if (want_csv) {
    for (const Table& t : report.tables) {
      std::ostringstream os;
      for (std::size_t k = 0; k < t.header.size(); ++k)
        os << (k ? "," : "") << csv_quote(t.header[k]);
      os << "\n";
      for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k)
          os << (k ? "," : "") << format_double(row[k]);
        os << "\n";
      }
      atomic_write(fs::path(dir) / (t.name + ".csv"), os.str());
    }
  }
  if (want_plot) {
    for (const Table& t : report.tables) {
      if (t.header.size() < 2) continue;
      std::ostringstream os;
      os << "# " << t.name << ": " << t.header[0] << " " << t.header[1] << "\n";
      for (const auto& row : t.rows)
        if (row.size() >= 2)
          os << format_double(row[0]) << " " << format_double(row[1]) << "\n";
      atomic_write(fs::path(dir) / (t.name + ".dat"), os.str());
    }
  }
  if (want_json) {
    nlohmann::json j;
    j["config_hash"] = report.config_hash;
    j["grid_sizes"] = report.grid_sizes;
    j["all_pass"] = report.all_pass();
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& e : report.ledger) {
      nlohmann::json c;
      c["name"] = e.name;
      c["property"] = e.property;
      c["measured"] = e.measured;
      c["threshold"] = e.threshold;
      c["pass"] = e.pass;
      if (!e.detail.empty()) c["detail"] = e.detail;
      checks.push_back(c);
    }
    j["checks"] = checks;
    nlohmann::json tables = nlohmann::json::array();
    for (const Table& t : report.tables) tables.push_back(t.name);
    j["tables"] = tables;
    atomic_write(fs::path(dir) / "summary.json", j.dump(2) + "\n");
  }
}

} // namespace hjb
