// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RIESZ_SMC_CSV_HPP
#define RIESZ_SMC_CSV_HPP

#include <string>
#include <vector>

#include "riesz_smc/common.hpp"

namespace riesz_smc {

// Doubles are serialized with %.17g, which round-trips exactly.
std::string format_g17(double v);

// Writes via a temp file in the same directory followed by a rename, so
// concurrent writers never expose partial content.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);

double parse_double(const std::string& s, const std::string& context);

struct PriceSeries {
  std::vector<std::string> dates;  // ISO-8601, chronological
  std::vector<double> close;
};

// Expects header `date,close`; throws invalid-data naming the first bad row.
PriceSeries read_price_csv(const std::string& path);

}  // namespace riesz_smc

#endif  // RIESZ_SMC_CSV_HPP
