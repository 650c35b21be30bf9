#pragma once

// Read-only reference tables shipped under fixtures/. Each file is checked
// against a compiled-in FNV-1a hash on every load.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "geostretch/cli/config.hpp"
#include "geostretch/cli/io.hpp"
#include "geostretch/errors.hpp"

#ifndef GEOSTRETCH_FIXTURE_DIR
#define GEOSTRETCH_FIXTURE_DIR "fixtures"
#endif

namespace geostretch::cli {

class FixtureError : public Error {
public:
  using Error::Error;
};

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct FixtureInfo {
  const char* name;
  const char* file;
  std::uint64_t checksum;
};

inline const std::vector<FixtureInfo>& fixture_catalog() {
  static const std::vector<FixtureInfo> catalog{
      {"ds_slice", "ds_slice.csv", 0x2049c8535216db7bULL},
      {"chiavazzo_gsm", "chiavazzo_gsm.csv", 0x3fff802f36854ea1ULL},
      {"chiavazzo_qem", "chiavazzo_qem.csv", 0xf2667a6fee1e0589ULL},
      {"chiavazzo_seildm", "chiavazzo_seildm.csv", 0x9660ad547718d690ULL},
      {"chiavazzo_sqem", "chiavazzo_sqem.csv", 0xeb56d5179e4ec020ULL},
  };
  return catalog;
}

struct FixtureTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(const std::string& c) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == c) return i;
    throw FixtureError("fixture '" + name + "' has no column '" + c + "'");
  }
  std::vector<double> column(const std::string& c) const {
    const std::size_t i = column_index(c);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[i]);
    return out;
  }
};

/// Parses fixture text after its checksum has been verified.
inline FixtureTable parse_fixture(const std::string& name, const std::string& text) {
  FixtureTable t;
  t.name = name;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FixtureError("fixture '" + name + "' is empty");
  t.columns = split(trim(line), ',');
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.columns.size()) throw FixtureError("fixture '" + name + "': ragged row '" + line + "'");
    std::vector<double> r;
    for (const auto& c : cells) r.push_back(parse_double(name, c));
    t.rows.push_back(std::move(r));
  }
  return t;
}

inline FixtureTable load_fixture(const std::string& name, const std::string& dir = GEOSTRETCH_FIXTURE_DIR) {
  for (const auto& info : fixture_catalog()) {
    if (name != info.name) continue;
    const std::string path = dir + "/" + info.file;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FixtureError("cannot open fixture '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    if (fnv1a64(bytes) != info.checksum)
      throw FixtureError("fixture '" + path + "' does not match its recorded checksum");
    return parse_fixture(name, bytes);
  }
  throw FixtureError("unknown fixture '" + name + "'");
}

}  // namespace geostretch::cli
