#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace funreg {

// Flat key = value configuration text. '#' starts a comment; keys are
// unique; values keep their raw spelling for the metadata echo.
class ConfigMap {
 public:
  ConfigMap() = default;

  static ConfigMap parse_file(const std::string& path);
  static ConfigMap parse_text(const std::string& text,
                              const std::string& origin = "<inline>");

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  // Every key must be listed; unknown keys are errors.
  void require_known(const std::set<std::string>& allowed) const;

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;
  std::vector<long> get_long_list(const std::string& key,
                                  const std::vector<long>& fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }
  const std::string& origin() const { return origin_; }

 private:
  std::string lookup(const std::string& key) const;

  std::map<std::string, std::string> values_;
  std::vector<std::pair<std::string, std::string>> entries_;
  std::string origin_ = "config";
};

}  // namespace funreg
