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

// Symbolic real series with closed-form terms.
//
// Every series handled by the library is one of a small set of families whose
// terms are known in closed form. This is what makes tail envelopes and
// dependency structure certifiable:
//
//   rademacher_harmonic(i, p):  a_m = (-1)^floor(m / 2^i) / (m+1)^p,  0 < p <= 1
//   power_alternating(p):       a_m = (-1)^m / (m+1)^p,               0 < p <= 1
//   abs_power(q, c, [i]):       a_m = c * sigma_i(m) / (m+1)^q,       q > 1
//   composite:                  a_m = sum_k c_k * ref_k(m) + perturbation(m)
//
// where sigma_i is the level-i Rademacher sign pattern (or +1 when abs_power
// carries no sign level).

#ifndef REARRANGE_SERIES_HPP_
#define REARRANGE_SERIES_HPP_

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace rearrange {

// Largest sign-pattern level accepted anywhere.
inline constexpr unsigned kMaxLevel = 30;

struct SeriesSpec;
using SeriesPtr = std::shared_ptr<const SeriesSpec>;

struct RademacherHarmonic {
  unsigned level = 0;
  double exponent = 1.0;
};

struct PowerAlternating {
  double exponent = 1.0;
};

struct AbsPower {
  double exponent = 2.0;
  double scale = 1.0;
  std::optional<unsigned> sign_level;
};

struct ComboTerm {
  double coefficient = 0.0;
  SeriesPtr ref;
  // Position of `ref` inside its family, when the composite was declared
  // relative to one.
  std::optional<std::size_t> ref_index;
};

struct Composite {
  std::vector<ComboTerm> terms;
  SeriesPtr perturbation;  // may be null
};

struct SeriesSpec {
  std::variant<RademacherHarmonic, PowerAlternating, AbsPower, Composite> kind;

  static SeriesPtr rademacher_harmonic(unsigned level, double exponent = 1.0);
  static SeriesPtr power_alternating(double exponent = 1.0);
  static SeriesPtr abs_power(double exponent, double scale = 1.0,
                             std::optional<unsigned> sign_level = std::nullopt);
  static SeriesPtr composite(std::vector<ComboTerm> terms,
                             SeriesPtr perturbation = nullptr);
};

// Ordered family <a^0, ..., a^{d-1}> sharing the index set of the naturals.
struct FamilyVector {
  std::vector<SeriesPtr> specs;

  std::size_t size() const { return specs.size(); }
  const SeriesSpec& operator[](std::size_t i) const { return *specs[i]; }
  // The family truncated to its first d members.
  FamilyVector prefix(std::size_t d) const;
};

// (-1)^floor(m / 2^level)
inline double rademacher_sign(unsigned level, std::size_t m) {
  return ((m >> level) & 1U) != 0 ? -1.0 : 1.0;
}

double term(const SeriesSpec& spec, std::size_t m);

// Coordinates 0..d-1 of the family term at m (d defaults to the family size).
std::vector<double> vector_term(const FamilyVector& fam, std::size_t m);
void vector_term(const FamilyVector& fam, std::size_t m, std::span<double> out);

// Sum of the terms at `indices`, accumulated in the given order. Throws
// InvalidInput on a repeated index.
double partial_sum(const SeriesSpec& spec, std::span<const std::size_t> indices);

// Envelope B(m) >= |a_k| for all k >= m; nonincreasing in m and tending to 0.
double tail_sup_bound(const SeriesSpec& spec, std::size_t m);
// Euclidean envelope over the first d coordinates of the family.
double tail_sup_bound(const FamilyVector& fam, std::size_t m, std::size_t d);

class TailBound {
 public:
  TailBound(FamilyVector fam, std::size_t d) : fam_(std::move(fam)), d_(d) {}
  double at(std::size_t m) const { return tail_sup_bound(fam_, m, d_); }

 private:
  FamilyVector fam_;
  std::size_t d_;
};

inline constexpr std::size_t kDefaultSumBudget = 100'000'000;

// Value of the series in its natural order, within `precision`. Throws
// BudgetExhausted when more than `term_budget` terms would be needed.
double classical_sum(const SeriesSpec& spec, double precision,
                     std::size_t term_budget = kDefaultSumBudget);

// Oscillating generator: a Rademacher sign pattern on a power magnitude.
// power_alternating(p) is the level-0 generator with exponent p.
struct GeneratorKey {
  unsigned level = 0;
  double exponent = 1.0;
  auto operator<=>(const GeneratorKey&) const = default;
};

// A series flattened to sum_g coef_g * generator_g + absolutely convergent rest.
struct CanonicalForm {
  std::map<GeneratorKey, double> oscillating;
  std::vector<std::pair<double, AbsPower>> absolute;
};

CanonicalForm canonical_form(const SeriesSpec& spec);

// Structural test: true iff the canonical form keeps an oscillating part.
// Distinct generators are jointly independent, so any nonzero oscillating
// combination is conditionally (not absolutely) convergent.
bool is_conditionally_convergent(const SeriesSpec& spec);

// Largest sign level used by the spec (0 when it has no sign pattern).
unsigned max_sign_level(const SeriesSpec& spec);

}  // namespace rearrange

#endif  // REARRANGE_SERIES_HPP_
