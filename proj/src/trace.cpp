// Copyright 2026 The Rearrange Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rearrange/trace.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "rearrange/errors.hpp"

namespace rearrange {

std::vector<TraceRow> build_trace(const FamilyVector& fam, const PrefixPlan& plan, std::size_t d) {
  if (d > fam.size()) throw InvalidInput("build_trace: dimension exceeds family size");
  std::vector<TraceRow> rows;
  rows.reserve(plan.injection.size());
  std::vector<double> sums(d, 0.0);
  for (std::size_t k = 0; k < plan.injection.size(); ++k) {
    TraceRow row;
    row.step = k;
    row.index = plan.injection[k];
    row.terms.resize(d);
    vector_term(fam, row.index, row.terms);
    for (std::size_t j = 0; j < d; ++j) sums[j] += row.terms[j];
    row.sums = sums;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_trace(const std::vector<TraceRow>& rows, std::size_t d) {
  std::string out = "step,index";
  for (std::size_t j = 0; j < d; ++j) out += fmt::format(",term_{}", j);
  for (std::size_t j = 0; j < d; ++j) out += fmt::format(",sum_{}", j);
  out += '\n';
  for (const auto& row : rows) {
    if (row.terms.size() != d || row.sums.size() != d) throw InvalidInput("format_trace: row width mismatch");
    out += fmt::format("{},{}", row.step, row.index);
    for (double t : row.terms) out += fmt::format(",{:.17g}", t);
    for (double s : row.sums) out += fmt::format(",{:.17g}", s);
    out += '\n';
  }
  return out;
}

void emit_trace(const std::vector<TraceRow>& rows, std::size_t d, const std::string& path) {
  write_text_file(path, format_trace(rows, d));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace rearrange
