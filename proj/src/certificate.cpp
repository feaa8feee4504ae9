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

#include "rearrange/certificate.hpp"

#include <algorithm>

#include <json.hpp>

#include "rearrange/errors.hpp"
#include "rearrange/trace.hpp"

namespace rearrange {
namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& at) {
  if (!obj.is_object() || !obj.contains(key)) throw ValidationError(at + ": missing key '" + key + "'");
  return obj.at(key);
}

}  // namespace

std::string format_certificate(const CertificateChain& chain, const ConstantSchedule& schedule) {
  std::size_t max_d = 1;
  for (const auto& c : chain.conditions) max_d = std::max(max_d, c.d);
  json sched = json::array();
  for (std::size_t d = 1; d <= max_d; ++d) sched.push_back(schedule.at(d));

  json conditions = json::array();
  for (const auto& c : chain.conditions) {
    conditions.push_back({{"f", c.f}, {"d", c.d}, {"eps", to_fraction(c.eps)}});
  }
  json links = json::array();
  for (std::size_t i = 0; i < chain.checks.size(); ++i) {
    const OrderEvidence& ev = chain.checks[i];
    links.push_back({{"upper", i},
                     {"lower", i + 1},
                     {"extends", ev.extends},
                     {"dimension_ok", ev.dimension_ok},
                     {"max_block_prefix_norm", ev.max_block_prefix_norm},
                     {"envelope_ok", ev.envelope_ok},
                     {"block_norm", ev.block_norm},
                     {"two_delta_plus_block", ev.two_delta_plus_block},
                     {"shrink_ok", ev.shrink_ok}});
  }
  json doc = {{"format", kCertificateFormat},
              {"targets", chain.targets},
              {"schedule", sched},
              {"slack", kCertificateSlack},
              {"tail_window", kExactTailWindow},
              {"conditions", conditions},
              {"links", links}};
  return doc.dump(1) + "\n";
}

void emit_certificate(const CertificateChain& chain, const std::string& path, const ConstantSchedule& schedule) {
  write_text_file(path, format_certificate(chain, schedule));
}

LoadedCertificate parse_certificate(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("certificate parse error: ") + e.what(), 0, e.byte);
  }
  try {
    if (require(doc, "format", "certificate") != kCertificateFormat) {
      throw ValidationError("certificate: unsupported format");
    }
    LoadedCertificate cert;
    cert.targets = require(doc, "targets", "certificate").get<TargetVector>();
    cert.schedule = require(doc, "schedule", "certificate").get<std::vector<double>>();
    cert.slack = require(doc, "slack", "certificate").get<double>();
    cert.tail_window = require(doc, "tail_window", "certificate").get<std::size_t>();
    for (const json& c : require(doc, "conditions", "certificate")) {
      Condition cond;
      cond.f = require(c, "f", "condition").get<std::vector<std::size_t>>();
      cond.d = require(c, "d", "condition").get<std::size_t>();
      cond.eps = parse_fraction(require(c, "eps", "condition").get<std::string>());
      cert.conditions.push_back(std::move(cond));
    }
    for (const json& l : require(doc, "links", "certificate")) {
      OrderEvidence ev;
      ev.extends = require(l, "extends", "link").get<bool>();
      ev.dimension_ok = require(l, "dimension_ok", "link").get<bool>();
      ev.max_block_prefix_norm = require(l, "max_block_prefix_norm", "link").get<double>();
      ev.envelope_ok = require(l, "envelope_ok", "link").get<bool>();
      ev.block_norm = require(l, "block_norm", "link").get<double>();
      ev.two_delta_plus_block = require(l, "two_delta_plus_block", "link").get<double>();
      ev.shrink_ok = require(l, "shrink_ok", "link").get<bool>();
      cert.recorded_links.push_back(ev);
    }
    return cert;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("certificate: malformed field: ") + e.what());
  }
}

}  // namespace rearrange
