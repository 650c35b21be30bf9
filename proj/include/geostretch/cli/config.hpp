#pragma once

// Plain-text run configuration: one `key = value` per line, `#` comments.
// A CSV written by the tool starts with the same pairs as `# key = value`
// lines under a marker line, so its header block is itself a loadable config.

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "geostretch/errors.hpp"

namespace geostretch::cli {

/// Invalid or missing configuration entry; names the offending key.
class UsageError : public Error {
public:
  UsageError(const std::string& key, const std::string& what) : Error(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

private:
  std::string key_;
};

inline constexpr const char* kEchoMarker = "# geostretch run config";

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw UsageError(key, "expected a number, got '" + text + "'");
  return v;
}

inline long parse_long(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw UsageError(key, "expected an integer, got '" + text + "'");
  return v;
}

/// Ordered key-value configuration of a single run.
class RunConfig {
public:
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) {
    if (key.empty() || key.find_first_of("=#\n") != std::string::npos)
      throw UsageError(key, "invalid configuration key");
    if (value.find('\n') != std::string::npos) throw UsageError(key, "value spans several lines");
    values_[key] = trim(value);
  }
  void erase(const std::string& key) { values_.erase(key); }

  const std::string& get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw UsageError(key, "required setting is missing");
    return it->second;
  }
  std::string get_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key) : fallback;
  }
  double get_double(const std::string& key) const { return parse_double(key, get(key)); }
  double get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }
  long get_long_or(const std::string& key, long fallback) const { return has(key) ? parse_long(key, get(key)) : fallback; }

  const std::map<std::string, std::string>& values() const { return values_; }

  /// `key = value` lines in key order, each prefixed with `prefix`.
  std::string serialize(const std::string& prefix = "") const {
    std::string out;
    for (const auto& [k, v] : values_) out += prefix + k + " = " + v + "\n";
    return out;
  }

  /// Parses plain config text, or the echo block at the top of a generated CSV.
  static RunConfig parse(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    bool echoed = false;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string t = trim(line);
      if (lineno == 1 && t == kEchoMarker) {
        echoed = true;
        continue;
      }
      if (echoed) {
        if (t.rfind('#', 0) != 0) break;  // end of the echo block
        t = trim(t.substr(1));
      } else {
        const auto hash = t.find('#');
        if (hash != std::string::npos) t = trim(t.substr(0, hash));
      }
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw UsageError("line " + std::to_string(lineno), "expected 'key = value', got '" + t + "'");
      cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("config", "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

private:
  std::map<std::string, std::string> values_;
};

}  // namespace geostretch::cli
