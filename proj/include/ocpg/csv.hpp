#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ocpg/errors.hpp"

namespace ocpg {

// Shortest representation that round-trips IEEE-754 doubles exactly.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct CsvFile {
  std::string version_line;  // leading "# ..." header, if present
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

inline CsvFile read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("csv: cannot open " + path);
  CsvFile file;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (file.version_line.empty()) file.version_line = line;
      continue;
    }
    if (!have_header) {
      file.columns = split_csv_line(line);
      have_header = true;
    } else {
      file.rows.push_back(split_csv_line(line));
    }
  }
  return file;
}

}  // namespace ocpg
