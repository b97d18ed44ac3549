#include "optrate/config.hpp"

#include <algorithm>
#include <charconv>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace optrate {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_int(const std::string& s, long long& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno != 0 || *end != '\0') return false;
  out = v;
  return true;
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (errno != 0 || *end != '\0' || !std::isfinite(v)) return false;
  out = v;
  return true;
}

bool parse_bool(const std::string& s, bool& out) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "true" || l == "1" || l == "yes" || l == "on") {
    out = true;
    return true;
  }
  if (l == "false" || l == "0" || l == "no" || l == "off") {
    out = false;
    return true;
  }
  return false;
}

std::string fmt_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Validates `raw` against `type`; returns the canonical form.
std::string canonicalize(const std::string& raw, ValueType type, const std::string& key,
                         const std::string& source) {
  auto fail = [&]() -> std::string {
    throw ConfigError("config error: " + source + ": key '" + key + "' expects " +
                      to_string(type) + ", got '" + raw + "'");
  };
  const std::string v = trim(raw);
  switch (type) {
    case ValueType::integer: {
      long long x;
      if (!parse_int(v, x)) return fail();
      return std::to_string(x);
    }
    case ValueType::real: {
      double x;
      if (!parse_real(v, x)) return fail();
      return fmt_real(x);
    }
    case ValueType::boolean: {
      bool b;
      if (!parse_bool(v, b)) return fail();
      return b ? "true" : "false";
    }
    case ValueType::text:
      if (v.empty()) return fail();
      return v;
    case ValueType::real_list:
    case ValueType::int_list:
    case ValueType::text_list: {
      auto items = split_list(v);
      if (items.empty()) return fail();
      std::string out;
      for (std::size_t i = 0; i < items.size(); ++i) {
        std::string c;
        if (type == ValueType::real_list) {
          double x;
          if (!parse_real(items[i], x)) return fail();
          c = fmt_real(x);
        } else if (type == ValueType::int_list) {
          long long x;
          if (!parse_int(items[i], x)) return fail();
          c = std::to_string(x);
        } else {
          c = items[i];
        }
        if (i) out += ",";
        out += c;
      }
      return out;
    }
  }
  return fail();
}

}  // namespace

std::string to_string(ValueType t) {
  switch (t) {
    case ValueType::integer: return "integer";
    case ValueType::real: return "real";
    case ValueType::boolean: return "boolean";
    case ValueType::text: return "string";
    case ValueType::real_list: return "comma-separated list of reals";
    case ValueType::int_list: return "comma-separated list of integers";
    case ValueType::text_list: return "comma-separated list of strings";
  }
  return "unknown";
}

RawConfig parse_config_text(const std::string& text, const std::string& source_name) {
  RawConfig cfg;
  std::string section = "global";
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError("config error: " + where + ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config error: " + where + ": expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config error: " + where + ": empty key");
    auto& sec = cfg.sections[section];
    if (sec.count(key))
      throw ConfigError("config error: " + where + ": key '" + key + "' repeated in [" + section + "]");
    sec[key] = {value, where};
  }
  return cfg;
}

RawConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config error: cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

ResolvedConfig::ResolvedConfig(std::string scenario, const Schema& schema)
    : scenario_(std::move(scenario)), schema_(schema) {
  for (const auto& k : schema_)
    values_[k.name] = canonicalize(k.default_value, k.type, k.name, "default");
}

const KeySpec& ResolvedConfig::spec(const std::string& key) const {
  for (const auto& k : schema_)
    if (k.name == key) return k;
  throw ConfigError("config error: unknown key '" + key + "' for scenario '" + scenario_ + "'");
}

void ResolvedConfig::set(const std::string& key, const std::string& value,
                         const std::string& source) {
  const KeySpec* found = nullptr;
  for (const auto& k : schema_)
    if (k.name == key) found = &k;
  if (!found) {
    std::string valid;
    for (const auto& k : schema_) valid += (valid.empty() ? "" : ", ") + k.name;
    throw ConfigError("config error: " + source + ": unknown key '" + key + "' for scenario '" +
                      scenario_ + "' (valid keys: " + valid + ")");
  }
  values_[key] = canonicalize(value, found->type, key, source);
}

long long ResolvedConfig::get_int(const std::string& key) const {
  spec(key);
  long long v = 0;
  parse_int(values_.at(key), v);
  return v;
}

double ResolvedConfig::get_real(const std::string& key) const {
  spec(key);
  double v = 0.0;
  parse_real(values_.at(key), v);
  return v;
}

bool ResolvedConfig::get_bool(const std::string& key) const {
  spec(key);
  return values_.at(key) == "true";
}

std::string ResolvedConfig::get_text(const std::string& key) const {
  spec(key);
  return values_.at(key);
}

std::vector<double> ResolvedConfig::get_real_list(const std::string& key) const {
  spec(key);
  std::vector<double> out;
  for (const auto& s : split_list(values_.at(key))) {
    double v = 0.0;
    parse_real(s, v);
    out.push_back(v);
  }
  return out;
}

std::vector<long long> ResolvedConfig::get_int_list(const std::string& key) const {
  spec(key);
  std::vector<long long> out;
  for (const auto& s : split_list(values_.at(key))) {
    long long v = 0;
    parse_int(s, v);
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> ResolvedConfig::get_text_list(const std::string& key) const {
  spec(key);
  return split_list(values_.at(key));
}

std::vector<std::pair<std::string, std::string>> ResolvedConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : schema_) out.emplace_back(k.name, values_.at(k.name));
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t ResolvedConfig::hash() const {
  std::string canon = "scenario=" + scenario_ + "\n";
  for (const auto& [k, v] : entries()) canon += k + "=" + v + "\n";
  return fnv1a64(canon);
}

Override parse_override(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("config error: override '" + text + "' is not of the form key=value");
  Override o;
  std::string lhs = trim(text.substr(0, eq));
  o.value = trim(text.substr(eq + 1));
  auto dot = lhs.find('.');
  if (dot != std::string::npos) {
    o.scenario = lhs.substr(0, dot);
    o.key = lhs.substr(dot + 1);
  } else {
    o.key = lhs;
  }
  if (o.key.empty()) throw ConfigError("config error: override '" + text + "' has an empty key");
  return o;
}

ResolvedConfig resolve_config(const std::string& scenario, const Schema& schema,
                              const RawConfig& raw, const std::vector<Override>& overrides) {
  ResolvedConfig cfg(scenario, schema);
  auto known = [&](const std::string& key) {
    return std::any_of(schema.begin(), schema.end(), [&](const KeySpec& k) { return k.name == key; });
  };
  if (auto it = raw.sections.find("global"); it != raw.sections.end()) {
    for (const auto& [key, entry] : it->second)
      if (known(key)) cfg.set(key, entry.value, entry.source);
  }
  if (auto it = raw.sections.find(scenario); it != raw.sections.end()) {
    for (const auto& [key, entry] : it->second) cfg.set(key, entry.value, entry.source);
  }
  for (const auto& o : overrides) {
    if (!o.scenario.empty() && o.scenario != scenario) continue;
    cfg.set(o.key, o.value, "override " + (o.scenario.empty() ? "" : o.scenario + ".") + o.key);
  }
  return cfg;
}

}  // namespace optrate
