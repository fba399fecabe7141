#pragma once
// Result tables, the acceptance ledger, and deterministic file emission.

#include "hjb/config.hpp"

#include <string>
#include <vector>

namespace hjb {

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct LedgerEntry {
  std::string name;      // short check id
  std::string property;  // what is being verified
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct RunReport {
  std::vector<Table> tables;
  std::vector<LedgerEntry> ledger;
  std::string config_hash;
  std::vector<long> grid_sizes;

  bool all_pass() const;
};

// FNV-1a over the canonical configuration text.
std::string config_hash_hex(const ExperimentConfig& cfg);

// Writes the selected formats under dir: one CSV per table ("<name>.csv"),
// a JSON summary ("summary.json"), and two-column plot-data files. All writes
// are atomic (temp file then rename) and byte-deterministic.
void emit_report(const RunReport& report, const ExperimentConfig& cfg,
                 const std::string& dir);

std::string format_double(double v);  // fixed 17-significant-digit encoding

} // namespace hjb
