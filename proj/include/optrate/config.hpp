#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace optrate {

// Thrown for malformed configs and overrides; the message names the key,
// the location and the expected type.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RawEntry {
  std::string value;
  std::string source;  // "file.cfg:12" or "override"
};

// Flat `key = value` text with `[section]` headers; '#' starts a comment.
// Keys before any header belong to section "global".
struct RawConfig {
  std::map<std::string, std::map<std::string, RawEntry>> sections;
};

RawConfig parse_config_text(const std::string& text, const std::string& source_name);
RawConfig load_config_file(const std::string& path);

enum class ValueType { integer, real, boolean, text, real_list, int_list, text_list };
std::string to_string(ValueType t);

struct KeySpec {
  std::string name;
  ValueType type;
  std::string default_value;
  std::string help;
};

using Schema = std::vector<KeySpec>;

// Typed, fully resolved key set for one scenario.
class ResolvedConfig {
 public:
  ResolvedConfig() = default;
  ResolvedConfig(std::string scenario, const Schema& schema);

  const std::string& scenario() const { return scenario_; }
  void set(const std::string& key, const std::string& value, const std::string& source);

  long long get_int(const std::string& key) const;
  double get_real(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::string get_text(const std::string& key) const;
  std::vector<double> get_real_list(const std::string& key) const;
  std::vector<long long> get_int_list(const std::string& key) const;
  std::vector<std::string> get_text_list(const std::string& key) const;

  // key -> canonical value string, in schema order
  std::vector<std::pair<std::string, std::string>> entries() const;
  std::uint64_t hash() const;  // FNV-1a over the canonical entries

 private:
  const KeySpec& spec(const std::string& key) const;
  std::string scenario_;
  Schema schema_;
  std::map<std::string, std::string> values_;
};

struct Override {
  std::string scenario;  // empty: applies to whichever scenario runs
  std::string key;
  std::string value;
};

Override parse_override(const std::string& text);

// Defaults from the schema, then [global] keys the schema knows, then the
// scenario section, then overrides. Unknown keys in the scenario section or
// in overrides targeting this scenario are errors.
ResolvedConfig resolve_config(const std::string& scenario, const Schema& schema,
                              const RawConfig& raw, const std::vector<Override>& overrides);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace optrate
