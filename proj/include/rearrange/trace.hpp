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

#ifndef REARRANGE_TRACE_HPP_
#define REARRANGE_TRACE_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "rearrange/rearranger.hpp"
#include "rearrange/series.hpp"

namespace rearrange {

struct TraceRow {
  std::size_t step = 0;
  std::size_t index = 0;
  std::vector<double> terms;  // per series
  std::vector<double> sums;   // running sums, per series
};

// One row per injection entry, over the first d series.
std::vector<TraceRow> build_trace(const FamilyVector& fam, const PrefixPlan& plan, std::size_t d);

// CSV with columns step,index,term_0..term_{d-1},sum_0..sum_{d-1}. Doubles
// are printed with 17 significant digits, so output is byte-stable.
std::string format_trace(const std::vector<TraceRow>& rows, std::size_t d);
void emit_trace(const std::vector<TraceRow>& rows, std::size_t d, const std::string& path);

// Writes `content` to `path`, throwing IoError naming the path on failure.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace rearrange

#endif  // REARRANGE_TRACE_HPP_
