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

// Certificate files for descending condition chains, and their verifier.
//
// A certificate is JSON:
//
//   {"format": "rearrange-certificate/1",
//    "targets": [...], "schedule": [C_1, ..., C_dmax], "slack": 1e-9,
//    "tail_window": 10000,
//    "conditions": [{"f": [...], "d": 1, "eps": "p/q"}, ...],
//    "links": [{"upper": 0, "lower": 1, "extends": true, "dimension_ok": true,
//               "max_block_prefix_norm": ..., "block_norm": ...,
//               "two_delta_plus_block": ...}, ...]}
//
// The verifier recomputes every requirement of every condition and link from
// the series terms alone; it does not call into the forcing module.

#ifndef REARRANGE_CERTIFICATE_HPP_
#define REARRANGE_CERTIFICATE_HPP_

#include <string>
#include <vector>

#include "rearrange/forcing.hpp"
#include "rearrange/series.hpp"

namespace rearrange {

inline constexpr const char* kCertificateFormat = "rearrange-certificate/1";

std::string format_certificate(const CertificateChain& chain, const ConstantSchedule& schedule);
void emit_certificate(const CertificateChain& chain, const std::string& path,
                      const ConstantSchedule& schedule = published_schedule());

struct LoadedCertificate {
  TargetVector targets;
  std::vector<double> schedule;
  double slack = kCertificateSlack;
  std::size_t tail_window = kExactTailWindow;
  std::vector<Condition> conditions;
  std::vector<OrderEvidence> recorded_links;
};

// Throws ParseError or ValidationError on malformed input.
LoadedCertificate parse_certificate(const std::string& text);

struct VerificationReport {
  bool ok = true;
  std::string first_failure;       // empty when ok
  std::vector<std::string> lines;  // one line per checked requirement group
};

VerificationReport verify_certificate(const LoadedCertificate& cert, const FamilyVector& fam,
                                      const TargetVector& targets,
                                      const ConstantSchedule& schedule = published_schedule());

// File-level entry point. Throws IoError / ParseError / ValidationError for
// unreadable or malformed inputs.
VerificationReport verify_certificate(const std::string& cert_path, const std::string& spec_path,
                                      const TargetVector& targets,
                                      const ConstantSchedule& schedule = published_schedule());

}  // namespace rearrange

#endif  // REARRANGE_CERTIFICATE_HPP_
