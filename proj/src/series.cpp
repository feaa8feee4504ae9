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

#include "rearrange/series.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "rearrange/errors.hpp"

namespace rearrange {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double inverse_power(std::size_t m, double exponent) {
  const double base = static_cast<double>(m) + 1.0;
  if (exponent == 1.0) return 1.0 / base;
  if (exponent == 2.0) return 1.0 / (base * base);
  return std::pow(base, -exponent);
}

// sum_m sigma_level(m) / (m+1)^p, grouped into sign-constant blocks of length
// 2^level. Block magnitudes b_k are decreasing and convex, so with R the
// remainder after K blocks, |R - (-1)^K b_K / 2| <= (b_K - b_{K+1}) / 2.
double alternating_block_sum(unsigned level, double exponent, double precision,
                             std::size_t term_budget) {
  const std::size_t block = std::size_t{1} << level;
  auto block_magnitude = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t j = 0; j < block; ++j) s += inverse_power(k * block + j, exponent);
    return s;
  };
  double sum = 0.0;
  double sign = 1.0;
  double current = block_magnitude(0);
  for (std::size_t k = 0;; ++k) {
    const double next = block_magnitude(k + 1);
    if ((current - next) / 2.0 <= precision) return sum + sign * current / 2.0;
    if ((k + 2) * block > term_budget) {
      throw BudgetExhausted("classical_sum: precision not reachable within term budget");
    }
    sum += sign * current;
    sign = -sign;
    current = next;
  }
}

// sum_m (m+1)^-q for q > 1: direct sum of N terms plus the midpoint of the
// integral bracket [int_{N+1}^inf, int_N^inf] x^-q dx for the tail.
double positive_power_sum(double exponent, double precision, std::size_t term_budget) {
  const double q = exponent;
  auto half_width = [q](double n) {
    return (std::pow(n, 1.0 - q) - std::pow(n + 1.0, 1.0 - q)) / (2.0 * (q - 1.0));
  };
  double n = std::ceil(std::pow(1.0 / (2.0 * precision), 1.0 / q)) + 1.0;
  while (half_width(n) > precision) n *= 2.0;
  if (n > static_cast<double>(term_budget)) {
    throw BudgetExhausted("classical_sum: precision not reachable within term budget");
  }
  const auto count = static_cast<std::size_t>(n);
  double sum = 0.0;
  // Smallest terms first.
  for (std::size_t m = count; m-- > 0;) sum += inverse_power(m, q);
  const double lo = std::pow(n + 1.0, 1.0 - q) / (q - 1.0);
  const double hi = std::pow(n, 1.0 - q) / (q - 1.0);
  return sum + (lo + hi) / 2.0;
}

void accumulate_canonical(const SeriesSpec& spec, double coef, CanonicalForm& out,
                          std::map<GeneratorKey, double>& weight) {
  std::visit(Overloaded{
                 [&](const RademacherHarmonic& r) {
                   const GeneratorKey key{r.level, r.exponent};
                   out.oscillating[key] += coef;
                   weight[key] += std::abs(coef);
                 },
                 [&](const PowerAlternating& p) {
                   const GeneratorKey key{0, p.exponent};
                   out.oscillating[key] += coef;
                   weight[key] += std::abs(coef);
                 },
                 [&](const AbsPower& a) {
                   if (coef != 0.0) out.absolute.emplace_back(coef, a);
                 },
                 [&](const Composite& c) {
                   for (const auto& t : c.terms) {
                     accumulate_canonical(*t.ref, coef * t.coefficient, out, weight);
                   }
                   if (c.perturbation) accumulate_canonical(*c.perturbation, coef, out, weight);
                 },
             },
             spec.kind);
}

}  // namespace

SeriesPtr SeriesSpec::rademacher_harmonic(unsigned level, double exponent) {
  return std::make_shared<const SeriesSpec>(SeriesSpec{RademacherHarmonic{level, exponent}});
}

SeriesPtr SeriesSpec::power_alternating(double exponent) {
  return std::make_shared<const SeriesSpec>(SeriesSpec{PowerAlternating{exponent}});
}

SeriesPtr SeriesSpec::abs_power(double exponent, double scale, std::optional<unsigned> sign_level) {
  return std::make_shared<const SeriesSpec>(SeriesSpec{AbsPower{exponent, scale, sign_level}});
}

SeriesPtr SeriesSpec::composite(std::vector<ComboTerm> terms, SeriesPtr perturbation) {
  for (const auto& t : terms) {
    if (!t.ref) throw InvalidInput("composite term without a referenced series");
  }
  return std::make_shared<const SeriesSpec>(
      SeriesSpec{Composite{std::move(terms), std::move(perturbation)}});
}

FamilyVector FamilyVector::prefix(std::size_t d) const {
  FamilyVector out;
  out.specs.assign(specs.begin(), specs.begin() + static_cast<std::ptrdiff_t>(std::min(d, specs.size())));
  return out;
}

double term(const SeriesSpec& spec, std::size_t m) {
  return std::visit(Overloaded{
                        [m](const RademacherHarmonic& r) {
                          return rademacher_sign(r.level, m) * inverse_power(m, r.exponent);
                        },
                        [m](const PowerAlternating& p) {
                          return rademacher_sign(0, m) * inverse_power(m, p.exponent);
                        },
                        [m](const AbsPower& a) {
                          const double sign = a.sign_level ? rademacher_sign(*a.sign_level, m) : 1.0;
                          return a.scale * sign * inverse_power(m, a.exponent);
                        },
                        [m](const Composite& c) {
                          double s = 0.0;
                          for (const auto& t : c.terms) s += t.coefficient * term(*t.ref, m);
                          if (c.perturbation) s += term(*c.perturbation, m);
                          return s;
                        },
                    },
                    spec.kind);
}

void vector_term(const FamilyVector& fam, std::size_t m, std::span<double> out) {
  const std::size_t d = std::min(out.size(), fam.size());
  for (std::size_t i = 0; i < d; ++i) out[i] = term(fam[i], m);
}

std::vector<double> vector_term(const FamilyVector& fam, std::size_t m) {
  std::vector<double> out(fam.size());
  vector_term(fam, m, out);
  return out;
}

double partial_sum(const SeriesSpec& spec, std::span<const std::size_t> indices) {
  std::unordered_set<std::size_t> seen;
  seen.reserve(indices.size());
  double s = 0.0;
  for (std::size_t m : indices) {
    if (!seen.insert(m).second) {
      throw InvalidInput("partial_sum: duplicate index " + std::to_string(m));
    }
    s += term(spec, m);
  }
  return s;
}

double tail_sup_bound(const SeriesSpec& spec, std::size_t m) {
  return std::visit(Overloaded{
                        [m](const RademacherHarmonic& r) { return inverse_power(m, r.exponent); },
                        [m](const PowerAlternating& p) { return inverse_power(m, p.exponent); },
                        [m](const AbsPower& a) { return std::abs(a.scale) * inverse_power(m, a.exponent); },
                        [m](const Composite& c) {
                          double s = 0.0;
                          for (const auto& t : c.terms) s += std::abs(t.coefficient) * tail_sup_bound(*t.ref, m);
                          if (c.perturbation) s += tail_sup_bound(*c.perturbation, m);
                          return s;
                        },
                    },
                    spec.kind);
}

double tail_sup_bound(const FamilyVector& fam, std::size_t m, std::size_t d) {
  d = std::min(d, fam.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double b = tail_sup_bound(fam[i], m);
    sq += b * b;
  }
  return std::sqrt(sq);
}

double classical_sum(const SeriesSpec& spec, double precision, std::size_t term_budget) {
  if (!(precision > 0.0)) throw InvalidInput("classical_sum: precision must be positive");
  return std::visit(
      Overloaded{
          [&](const RademacherHarmonic& r) {
            return alternating_block_sum(r.level, r.exponent, precision, term_budget);
          },
          [&](const PowerAlternating& p) {
            return alternating_block_sum(0, p.exponent, precision, term_budget);
          },
          [&](const AbsPower& a) {
            if (a.scale == 0.0) return 0.0;
            const double scaled = precision / std::abs(a.scale);
            const double base = a.sign_level
                                    ? alternating_block_sum(*a.sign_level, a.exponent, scaled, term_budget)
                                    : positive_power_sum(a.exponent, scaled, term_budget);
            return a.scale * base;
          },
          [&](const Composite& c) {
            const double share = precision / static_cast<double>(c.terms.size() + 1);
            double s = 0.0;
            for (const auto& t : c.terms) {
              if (t.coefficient == 0.0) continue;
              s += t.coefficient * classical_sum(*t.ref, share / std::abs(t.coefficient), term_budget);
            }
            if (c.perturbation) s += classical_sum(*c.perturbation, share, term_budget);
            return s;
          },
      },
      spec.kind);
}

CanonicalForm canonical_form(const SeriesSpec& spec) {
  CanonicalForm out;
  std::map<GeneratorKey, double> weight;
  accumulate_canonical(spec, 1.0, out, weight);
  // Exact cancellation in floating point can leave rounding dust.
  std::erase_if(out.oscillating, [&](const auto& kv) {
    return std::abs(kv.second) <= 1e-12 * weight[kv.first];
  });
  return out;
}

bool is_conditionally_convergent(const SeriesSpec& spec) {
  return !canonical_form(spec).oscillating.empty();
}

unsigned max_sign_level(const SeriesSpec& spec) {
  return std::visit(Overloaded{
                        [](const RademacherHarmonic& r) { return r.level; },
                        [](const PowerAlternating&) { return 0U; },
                        [](const AbsPower& a) { return a.sign_level.value_or(0U); },
                        [](const Composite& c) {
                          unsigned level = 0;
                          for (const auto& t : c.terms) level = std::max(level, max_sign_level(*t.ref));
                          if (c.perturbation) level = std::max(level, max_sign_level(*c.perturbation));
                          return level;
                        },
                    },
                    spec.kind);
}

}  // namespace rearrange
