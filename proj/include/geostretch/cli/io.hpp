#pragma once

// Number formatting, grid/point parsing, atomic file output.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include "geostretch/cli/config.hpp"
#include "geostretch/models.hpp"

namespace geostretch::cli {

/// 17 significant digits, so that parsing the text restores the double.
/// Signed zero is written as 0.
inline std::string fmt(double v) {
  if (v == 0.0) return "0";
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// Comma-separated coordinates, e.g. "1,0.5".
inline Vector parse_point(const std::string& key, const std::string& text) {
  const auto parts = split(text, ',');
  Vector v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_double(key, parts[i]);
  return v;
}

/// `name=value`.
struct Assignment {
  std::string name;
  std::string value;
};

inline Assignment parse_assignment(const std::string& key, const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError(key, "expected name=value, got '" + text + "'");
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

/// Range `lo:hi`, `lo:hi:step` or `lo:hi:N`. A third field written as a plain
/// integer (no '.', no exponent) is a point count; anything else is a step.
struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::optional<long> count;
  std::optional<double> step;

  std::vector<double> points(long default_count) const {
    std::vector<double> out;
    if (step) {
      const double s = *step;
      for (long i = 0;; ++i) {
        const double x = lo + static_cast<double>(i) * s;
        if (x > hi + 1e-9 * s) break;
        out.push_back(x);
      }
      return out;
    }
    const long m = count.value_or(default_count);
    for (long i = 0; i < m; ++i)
      out.push_back(i == m - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1));
    return out;
  }
};

inline GridSpec parse_grid(const std::string& key, const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2 && parts.size() != 3) throw UsageError(key, "expected lo:hi[:step|:count], got '" + text + "'");
  GridSpec g;
  g.lo = parse_double(key, parts[0]);
  g.hi = parse_double(key, parts[1]);
  if (!(g.hi > g.lo)) throw UsageError(key, "range needs lo < hi");
  if (parts.size() == 3) {
    const std::string t = trim(parts[2]);
    if (t.find_first_of(".eE") == std::string::npos) {
      g.count = parse_long(key, t);
      if (*g.count < 2) throw UsageError(key, "point count must be at least 2");
    } else {
      g.step = parse_double(key, t);
      if (!(*g.step > 0.0)) throw UsageError(key, "step must be positive");
    }
  }
  return g;
}

/// Writes `content` to a sibling temp file and renames it over `path`.
inline void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("output", "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw UsageError("output", "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw UsageError("output", "cannot move output into place: " + ec.message());
  }
}

/// CSV text: echo block, header row, data rows.
class CsvDocument {
public:
  CsvDocument(const RunConfig& cfg, std::vector<std::string> columns) : columns_(std::move(columns)) {
    text_ = std::string(kEchoMarker) + "\n" + cfg.serialize("# ");
    for (std::size_t i = 0; i < columns_.size(); ++i) text_ += (i ? "," : "") + columns_[i];
    text_ += "\n";
  }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) throw ShapeError("csv row width does not match header");
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += "\n";
  }
  const std::string& text() const { return text_; }

private:
  std::vector<std::string> columns_;
  std::string text_;
};

}  // namespace geostretch::cli
