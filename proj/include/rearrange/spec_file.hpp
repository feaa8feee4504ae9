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

// Series spec files.
//
// A spec file is a JSON document with one root object whose "families" key
// lists the members in order:
//
//   {"families": [
//     {"kind": "rademacher_harmonic", "level": 0, "exponent": 1},
//     {"kind": "power_alternating", "exponent": 0.5},
//     {"kind": "abs_power", "exponent": 2, "scale": 1, "level": 1},
//     {"kind": "composite",
//      "combo": [{"coefficient": -1, "ref": 0}, {"coefficient": -1, "ref": 1}],
//      "perturbation": {"kind": "abs_power", "exponent": 2}}
//   ]}
//
// "ref" names an earlier member by position. "level" on abs_power is an
// optional Rademacher sign pattern.

#ifndef REARRANGE_SPEC_FILE_HPP_
#define REARRANGE_SPEC_FILE_HPP_

#include <string>
#include <string_view>

#include "rearrange/series.hpp"

namespace rearrange {

// Throws ParseError (with 1-based line and column), ValidationError, or
// ReferenceError.
FamilyVector parse_spec_text(std::string_view text);
// As above; IoError when the file cannot be read.
FamilyVector parse_spec_file(const std::string& path);

// Inverse of parse_spec_text. Composite members must carry ref indices.
std::string serialize_spec(const FamilyVector& fam);

}  // namespace rearrange

#endif  // REARRANGE_SPEC_FILE_HPP_
