#include "optrate/result_table.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace optrate {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string utc_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ResultTable::add(int trial, const std::string& x_key, double x_value,
                      const std::string& quantity, double value) {
  rows_.push_back({scenario_, trial, x_key, x_value, quantity, value});
}

void ResultTable::add_metadata(const std::string& key, const std::string& value) {
  metadata_.emplace_back(key, value);
}

void ResultTable::append(const ResultTable& other) {
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
  metadata_.insert(metadata_.end(), other.metadata_.begin(), other.metadata_.end());
}

void ResultTable::sort_rows() {
  std::stable_sort(rows_.begin(), rows_.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.trial != b.trial) return a.trial < b.trial;
    return a.x_value < b.x_value;
  });
}

std::vector<double> ResultTable::values(const std::string& quantity) const {
  std::vector<double> out;
  for (const auto& r : rows_)
    if (r.quantity == quantity) out.push_back(r.value);
  return out;
}

std::vector<double> ResultTable::values(const std::string& quantity, double x_value) const {
  std::vector<double> out;
  for (const auto& r : rows_)
    if (r.quantity == quantity && r.x_value == x_value) out.push_back(r.value);
  return out;
}

std::string ResultTable::to_csv(bool with_timestamp) const {
  std::string out;
  for (const auto& [k, v] : metadata_) out += "# " + k + "=" + v + "\n";
  if (with_timestamp) out += "# timestamp=" + utc_timestamp() + "\n";
  out += "scenario,trial,x_key,x_value,quantity,value\n";
  for (const auto& r : rows_) {
    out += r.scenario + "," + std::to_string(r.trial) + "," + r.x_key + "," +
           format_double(r.x_value) + "," + r.quantity + "," + format_double(r.value) + "\n";
  }
  return out;
}

void ResultTable::write_csv(const std::string& path, bool with_timestamp) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << to_csv(with_timestamp);
  if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace optrate
