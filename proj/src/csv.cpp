// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#include "riesz_smc/csv.hpp"

#include <unistd.h>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace riesz_smc {

namespace fs = std::filesystem;

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(static_cast<unsigned long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::invalid_data, "cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw Error(ErrorKind::invalid_data, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::invalid_data, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

bool iso_date_like(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_data, "cannot open " + path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      table.header = split_row(line);
      first = false;
    } else {
      table.rows.push_back(split_row(line));
    }
  }
  if (first) throw Error(ErrorKind::invalid_data, path + " is empty");
  return table;
}

double parse_double(const std::string& s, const std::string& context) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw Error(ErrorKind::invalid_data, "cannot parse number '" + s + "' in " + context);
  }
  return v;
}

PriceSeries read_price_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  if (table.header.size() != 2 || table.header[0] != "date" || table.header[1] != "close") {
    throw Error(ErrorKind::invalid_data, path + ": expected header 'date,close'");
  }
  PriceSeries series;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    std::string row_id = path + " row " + std::to_string(r + 2);  // 1-based, after header
    const auto& row = table.rows[r];
    if (row.size() != 2) throw Error(ErrorKind::invalid_data, row_id + ": expected 2 fields");
    if (!iso_date_like(row[0])) {
      throw Error(ErrorKind::invalid_data, row_id + ": date '" + row[0] + "' is not ISO-8601");
    }
    double close = parse_double(row[1], row_id);
    if (!(close > 0.0)) throw Error(ErrorKind::invalid_data, row_id + ": close must be > 0");
    if (!series.dates.empty() && !(series.dates.back() < row[0])) {
      throw Error(ErrorKind::invalid_data, row_id + ": dates must be strictly increasing");
    }
    series.dates.push_back(row[0]);
    series.close.push_back(close);
  }
  if (series.close.size() < 2) throw Error(ErrorKind::invalid_data, path + ": needs at least 2 rows");
  return series;
}

}  // namespace riesz_smc
