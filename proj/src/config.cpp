#include "funreg/config.hpp"

#include <fstream>
#include <sstream>

#include "funreg/csv.hpp"
#include "funreg/errors.hpp"

namespace funreg {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

ConfigMap ConfigMap::parse_text(const std::string& text,
                                const std::string& origin) {
  ConfigMap config;
  config.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_number) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_number) +
                        ": empty key");
    if (config.values_.count(key))
      throw ConfigError(origin + ":" + std::to_string(line_number) +
                        ": duplicate key '" + key + "'");
    config.set(key, value);
  }
  return config;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str(), path);
}

void ConfigMap::set(const std::string& key, const std::string& value) {
  values_[key] = value;
  for (auto& entry : entries_) {
    if (entry.first == key) {
      entry.second = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

bool ConfigMap::has(const std::string& key) const {
  return values_.count(key) > 0;
}

void ConfigMap::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : values_)
    if (!allowed.count(key))
      throw ConfigError(origin_ + ": unknown key '" + key + "'");
}

std::string ConfigMap::lookup(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw ConfigError(origin_ + ": missing required key '" + key + "'");
  return it->second;
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) const {
  return has(key) ? values_.at(key) : fallback;
}

std::string ConfigMap::require_string(const std::string& key) const {
  return lookup(key);
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  double v;
  if (!try_parse_double(values_.at(key), v))
    throw ConfigError(origin_ + ": key '" + key + "' is not a number: '" +
                      values_.at(key) + "'");
  return v;
}

long ConfigMap::get_long(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const std::string& text = values_.at(key);
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": key '" + key + "' is not an integer: '" +
                      text + "'");
  }
}

std::uint64_t ConfigMap::get_u64(const std::string& key,
                                 std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& text = values_.at(key);
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": key '" + key +
                      "' is not an unsigned integer: '" + text + "'");
  }
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& text = values_.at(key);
  if (text == "true" || text == "on" || text == "1") return true;
  if (text == "false" || text == "off" || text == "0") return false;
  throw ConfigError(origin_ + ": key '" + key + "' is not a boolean: '" + text +
                    "'");
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) items.push_back(trim(item));
  return items;
}

}  // namespace

std::vector<double> ConfigMap::get_double_list(
    const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const std::string& item : split_list(values_.at(key))) {
    double v;
    if (!try_parse_double(item, v))
      throw ConfigError(origin_ + ": key '" + key +
                        "' has a non-numeric list item: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty())
    throw ConfigError(origin_ + ": key '" + key + "' is an empty list");
  return out;
}

std::vector<long> ConfigMap::get_long_list(
    const std::string& key, const std::vector<long>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<long> out;
  for (const std::string& item : split_list(values_.at(key))) {
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError(origin_ + ": key '" + key +
                        "' has a non-integer list item: '" + item + "'");
    }
  }
  if (out.empty())
    throw ConfigError(origin_ + ": key '" + key + "' is an empty list");
  return out;
}

}  // namespace funreg
