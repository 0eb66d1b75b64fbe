#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace subdiff::harness {

struct Check {
  std::string name;
  std::string metric;     // what `value` measures, e.g. "abs_error", "ks"
  double value = 0.0;
  double tolerance = 0.0;
  std::optional<double> std_error;
  std::string rule;       // how the tolerance was formed
  std::string comparison = "<=";  // value <= tolerance, or ">=" for lower bounds
  bool pass = false;
};

struct Metric {
  std::string name;
  double value = 0.0;
};

struct ComparisonReport {
  std::string kind;
  std::uint64_t seed = 0;
  std::size_t n_paths = 0;
  unsigned workers = 1;
  double runtime_seconds = 0.0;
  std::string version;
  std::vector<Check> checks;
  std::vector<Metric> metrics;
  std::vector<std::string> warnings;
  std::vector<std::string> files;

  bool passed() const;
  // value <= tolerance, recorded with its rule.
  Check& add_check(std::string name, std::string metric, double value, double tolerance,
                   std::string rule, std::optional<double> std_error = std::nullopt);
  // value >= threshold.
  Check& add_lower_bound(std::string name, std::string metric, double value, double threshold,
                         std::string rule);
};

std::string report_json(const ComparisonReport& report);
std::string report_text(const ComparisonReport& report);

// Writes report.json and report.txt into dir.
void write_report(const std::filesystem::path& dir, const ComparisonReport& report);

// CSV with a header row; doubles are written with 17 significant digits.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row();
  CsvTable& operator<<(double v);
  CsvTable& operator<<(long long v);
  CsvTable& operator<<(std::size_t v);
  CsvTable& operator<<(const std::string& v);
  CsvTable& operator<<(const char* v) { return *this << std::string(v); }
  CsvTable& operator<<(bool v) { return *this << std::string(v ? "true" : "false"); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_double(double v);

}  // namespace subdiff::harness
