#pragma once

#include <string>
#include <utility>
#include <vector>

namespace optrate {

struct ResultRow {
  std::string scenario;
  int trial = 0;  // -1 for scenario-level reference rows
  std::string x_key;
  double x_value = 0.0;
  std::string quantity;
  double value = 0.0;
};

class ResultTable {
 public:
  explicit ResultTable(std::string scenario = "") : scenario_(std::move(scenario)) {}

  void add(int trial, const std::string& x_key, double x_value, const std::string& quantity,
           double value);
  void add_metadata(const std::string& key, const std::string& value);
  void append(const ResultTable& other);  // rows and metadata

  // Stable sort by (trial, x_value); generation order breaks ties.
  void sort_rows();

  const std::vector<ResultRow>& rows() const { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const { return metadata_; }
  const std::string& scenario() const { return scenario_; }

  std::vector<double> values(const std::string& quantity) const;
  std::vector<double> values(const std::string& quantity, double x_value) const;

  // `# key=value` metadata lines, optional `# timestamp=...`, header, rows (shortest round-trip floats).
  std::string to_csv(bool with_timestamp = true) const;
  void write_csv(const std::string& path, bool with_timestamp = true) const;

 private:
  std::string scenario_;
  std::vector<ResultRow> rows_;
  std::vector<std::pair<std::string, std::string>> metadata_;
};

std::string format_double(double v);
std::string utc_timestamp();

}  // namespace optrate
