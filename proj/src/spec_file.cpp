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

#include "rearrange/spec_file.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "rearrange/errors.hpp"
#include "rearrange/trace.hpp"

namespace rearrange {
namespace {

using nlohmann::json;

std::string where(std::size_t member) { return "families[" + std::to_string(member) + "]"; }

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& at) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ValidationError(at + ": unknown key '" + key + "'");
  }
}

double number(const json& obj, const char* key, const std::string& at, std::optional<double> fallback) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ValidationError(at + ": missing key '" + key + "'");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(at + ": '" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(at + ": '" + key + "' must be finite");
  return x;
}

unsigned level_of(const json& obj, const std::string& at) {
  const json& v = obj.at("level");
  if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > kMaxLevel) {
    throw ValidationError(at + ": 'level' must be an integer in [0, " + std::to_string(kMaxLevel) + "]");
  }
  return v.get<unsigned>();
}

double oscillating_exponent(const json& obj, const std::string& at) {
  const double p = number(obj, "exponent", at, 1.0);
  if (!(p > 0.0 && p <= 1.0)) throw ValidationError(at + ": exponent must lie in (0, 1] for a conditionally convergent kind");
  return p;
}

SeriesPtr parse_member(const json& obj, const std::vector<SeriesPtr>& earlier, const std::string& at) {
  if (!obj.is_object()) throw ValidationError(at + ": expected an object");
  if (!obj.contains("kind") || !obj.at("kind").is_string()) throw ValidationError(at + ": missing string key 'kind'");
  const std::string kind = obj.at("kind").get<std::string>();

  if (kind == "rademacher_harmonic") {
    check_keys(obj, {"kind", "level", "exponent"}, at);
    if (!obj.contains("level")) throw ValidationError(at + ": missing key 'level'");
    return SeriesSpec::rademacher_harmonic(level_of(obj, at), oscillating_exponent(obj, at));
  }
  if (kind == "power_alternating") {
    check_keys(obj, {"kind", "exponent"}, at);
    return SeriesSpec::power_alternating(oscillating_exponent(obj, at));
  }
  if (kind == "abs_power") {
    check_keys(obj, {"kind", "exponent", "scale", "level"}, at);
    const double q = number(obj, "exponent", at, std::nullopt);
    if (!(q > 1.0)) throw ValidationError(at + ": abs_power exponent must exceed 1");
    std::optional<unsigned> level;
    if (obj.contains("level")) level = level_of(obj, at);
    return SeriesSpec::abs_power(q, number(obj, "scale", at, 1.0), level);
  }
  if (kind == "composite") {
    check_keys(obj, {"kind", "combo", "perturbation"}, at);
    std::vector<ComboTerm> terms;
    if (obj.contains("combo")) {
      const json& combo = obj.at("combo");
      if (!combo.is_array()) throw ValidationError(at + ": 'combo' must be a list");
      for (std::size_t k = 0; k < combo.size(); ++k) {
        const std::string here = at + ".combo[" + std::to_string(k) + "]";
        const json& item = combo[k];
        if (!item.is_object()) throw ValidationError(here + ": expected an object");
        check_keys(item, {"coefficient", "ref"}, here);
        if (!item.contains("ref") || !item.at("ref").is_number_integer()) {
          throw ValidationError(here + ": 'ref' must be an integer");
        }
        const long long ref = item.at("ref").get<long long>();
        if (ref < 0 || static_cast<std::size_t>(ref) >= earlier.size()) {
          throw ReferenceError(here + ": ref " + std::to_string(ref) + " does not name an earlier member");
        }
        const auto idx = static_cast<std::size_t>(ref);
        terms.push_back({number(item, "coefficient", here, std::nullopt), earlier[idx], idx});
      }
    }
    SeriesPtr perturbation;
    if (obj.contains("perturbation")) {
      perturbation = parse_member(obj.at("perturbation"), earlier, at + ".perturbation");
      if (is_conditionally_convergent(*perturbation)) {
        throw ValidationError(at + ": perturbation must be absolutely convergent");
      }
    }
    return SeriesSpec::composite(std::move(terms), std::move(perturbation));
  }
  throw ValidationError(at + ": unknown kind '" + kind + "'");
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json member_to_json(const SeriesSpec& spec) {
  return std::visit(Overloaded{
                        [](const RademacherHarmonic& r) {
                          return json{{"kind", "rademacher_harmonic"}, {"level", r.level}, {"exponent", r.exponent}};
                        },
                        [](const PowerAlternating& p) {
                          return json{{"kind", "power_alternating"}, {"exponent", p.exponent}};
                        },
                        [](const AbsPower& a) {
                          json j{{"kind", "abs_power"}, {"exponent", a.exponent}, {"scale", a.scale}};
                          if (a.sign_level) j["level"] = *a.sign_level;
                          return j;
                        },
                        [](const Composite& c) {
                          json combo = json::array();
                          for (const auto& t : c.terms) {
                            if (!t.ref_index) throw InvalidInput("serialize_spec: composite term without a ref index");
                            combo.push_back({{"coefficient", t.coefficient}, {"ref", *t.ref_index}});
                          }
                          json j{{"kind", "composite"}, {"combo", combo}};
                          if (c.perturbation) j["perturbation"] = member_to_json(*c.perturbation);
                          return j;
                        },
                    },
                    spec.kind);
}

}  // namespace

FamilyVector parse_spec_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("spec parse error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + e.what(),
                     line, column);
  }
  if (!doc.is_object()) throw ValidationError("spec: root must be an object");
  check_keys(doc, {"families"}, "spec");
  if (!doc.contains("families") || !doc.at("families").is_array()) {
    throw ValidationError("spec: 'families' must be a list");
  }
  FamilyVector fam;
  const json& members = doc.at("families");
  for (std::size_t i = 0; i < members.size(); ++i) {
    fam.specs.push_back(parse_member(members[i], fam.specs, where(i)));
  }
  return fam;
}

FamilyVector parse_spec_file(const std::string& path) { return parse_spec_text(read_text_file(path)); }

std::string serialize_spec(const FamilyVector& fam) {
  json members = json::array();
  for (const auto& spec : fam.specs) members.push_back(member_to_json(*spec));
  return json{{"families", members}}.dump(2) + "\n";
}

}  // namespace rearrange
