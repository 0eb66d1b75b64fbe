#include <array>
#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/harness/report.hpp"

namespace subdiff::harness {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  (void)ec;
  return {buf.data(), end};
}

bool ComparisonReport::passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

Check& ComparisonReport::add_check(std::string name, std::string metric, double value,
                                   double tolerance, std::string rule,
                                   std::optional<double> std_error) {
  Check c;
  c.name = std::move(name);
  c.metric = std::move(metric);
  c.value = value;
  c.tolerance = tolerance;
  c.rule = std::move(rule);
  c.std_error = std_error;
  c.pass = std::isfinite(value) && value <= tolerance;
  checks.push_back(std::move(c));
  return checks.back();
}

Check& ComparisonReport::add_lower_bound(std::string name, std::string metric, double value,
                                         double threshold, std::string rule) {
  Check& c = add_check(std::move(name), std::move(metric), value, threshold, std::move(rule));
  c.comparison = ">=";
  c.pass = std::isfinite(value) && value >= threshold;
  return c;
}

std::string report_json(const ComparisonReport& r) {
  nlohmann::ordered_json j;
  j["kind"] = r.kind;
  j["passed"] = r.passed();
  j["seed"] = r.seed;
  j["n_paths"] = r.n_paths;
  j["workers"] = r.workers;
  j["runtime_seconds"] = r.runtime_seconds;
  j["version"] = r.version;
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["metric"] = c.metric;
    e["value"] = c.value;
    e["tolerance"] = c.tolerance;
    e["comparison"] = c.comparison;
    e["rule"] = c.rule;
    if (c.std_error) e["std_error"] = *c.std_error;
    e["pass"] = c.pass;
    checks.push_back(std::move(e));
  }
  auto& metrics = j["metrics"] = nlohmann::ordered_json::object();
  for (const auto& m : r.metrics) metrics[m.name] = m.value;
  j["warnings"] = r.warnings;
  j["files"] = r.files;
  return j.dump(2) + "\n";
}

std::string report_text(const ComparisonReport& r) {
  std::ostringstream out;
  out << "experiment " << r.kind << "  seed " << r.seed << "  paths " << r.n_paths << "  workers "
      << r.workers << "  runtime " << r.runtime_seconds << " s\n";
  for (const auto& c : r.checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.metric << " = " << c.value
        << (c.comparison == ">=" ? " vs lower bound " : " vs tolerance ") << c.tolerance << " (" << c.rule << ")";
    if (c.std_error) out << " se=" << *c.std_error;
    out << '\n';
  }
  for (const auto& m : r.metrics) out << "metric " << m.name << " = " << m.value << '\n';
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
  out << (r.passed() ? "overall PASS\n" : "overall FAIL\n");
  return out.str();
}

void write_report(const std::filesystem::path& dir, const ComparisonReport& report) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, text] : {std::pair{"report.json", report_json(report)},
                                   std::pair{"report.txt", report_text(report)}}) {
    std::ofstream out(dir / name);
    if (!(out << text)) throw ResourceError("cannot write " + (dir / name).string());
  }
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  rows_.back().reserve(header_.size());
  return *this;
}

CsvTable& CsvTable::operator<<(double v) { return *this << format_double(v); }
CsvTable& CsvTable::operator<<(long long v) { return *this << std::to_string(v); }
CsvTable& CsvTable::operator<<(std::size_t v) { return *this << std::to_string(v); }

CsvTable& CsvTable::operator<<(const std::string& v) {
  if (rows_.empty()) throw PreconditionError("CsvTable: call row() first");
  if (rows_.back().size() == header_.size()) throw PreconditionError("CsvTable: row is full");
  rows_.back().push_back(v);
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  auto append = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out.push_back(',');
      out += cells[i];
    }
    out.push_back('\n');
  };
  append(header_);
  for (const auto& r : rows_) {
    if (r.size() != header_.size()) throw PreconditionError("CsvTable: incomplete row");
    append(r);
  }
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!(out << str())) throw ResourceError("cannot write " + path.string());
}

}  // namespace subdiff::harness
