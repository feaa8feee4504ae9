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

// Conditions (f, d, eps) and their extension order.
//
// A condition fixes a finite injection f, an active dimension d and a
// rational tolerance eps such that
//   * the first d coordinates of the partial sum along f are within eps of
//     the targets, and
//   * every term not in range(f) has first-d-coordinate norm < eps / C_d.
// (g, e, delta) <= (f, d, eps) when g extends f, e >= d, every partial block
// sum past f stays below 2 eps in the first d coordinates, and
// 2 delta + |block total| <= 2 eps.
//
// Tolerances are exact rationals; series sums are doubles, and every strict
// inequality is checked with `slack` subtracted from its right-hand side.

#ifndef REARRANGE_FORCING_HPP_
#define REARRANGE_FORCING_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rearrange/confinement.hpp"
#include "rearrange/rearranger.hpp"
#include "rearrange/series.hpp"

namespace rearrange {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr double kCertificateSlack = 1e-9;
// Unused indices below |f| + kExactTailWindow are checked term by term; the
// rest through the tail envelope.
inline constexpr std::size_t kExactTailWindow = 10'000;

double to_double(const Rational& r);
std::string to_fraction(const Rational& r);  // "p/q"
Rational parse_fraction(const std::string& text);

struct Condition {
  std::vector<std::size_t> f;
  std::size_t d = 1;
  Rational eps;
  bool operator==(const Condition&) const = default;
};

struct ConditionEvidence {
  bool injective = true;
  bool dimension_ok = true;
  bool eps_positive = true;
  double deviation = 0.0;
  bool deviation_ok = true;
  std::size_t cutoff = 0;
  double max_unused_norm = 0.0;  // over unused m < cutoff
  double tail_envelope = 0.0;    // envelope at cutoff
  double tail_threshold = 0.0;   // eps / C_d
  bool tail_ok = true;

  bool holds() const;
  // Name of the first failing requirement, empty when all hold.
  std::string first_failure() const;
};

struct ConditionOptions {
  std::optional<std::size_t> cutoff;  // default |f| + kExactTailWindow
  double slack = kCertificateSlack;
  const ConstantSchedule* schedule = nullptr;
};

ConditionEvidence is_condition(const Condition& c, const FamilyVector& fam, const TargetVector& targets,
                               const ConditionOptions& options = {});

struct OrderEvidence {
  bool extends = true;
  bool dimension_ok = true;
  double max_block_prefix_norm = 0.0;  // over every prefix past dom(f)
  bool envelope_ok = true;             // ... < 2 eps
  double block_norm = 0.0;             // |sum over dom(g) \ dom(f)|
  double two_delta_plus_block = 0.0;
  bool shrink_ok = true;               // ... <= 2 eps

  bool holds() const;
  std::string first_failure() const;
};

// Checks lower <= upper. Block sums use the first upper.d coordinates.
OrderEvidence leq(const Condition& lower, const Condition& upper, const FamilyVector& fam,
                  double slack = kCertificateSlack);

struct ExtendOptions {
  std::uint64_t seed = 0;
  std::size_t budget = 10'000'000;
  std::size_t restarts = 4;
  double slack = kCertificateSlack;
  const ConstantSchedule* schedule = nullptr;
};

struct ExtendStep {
  Condition condition;
  Rational eta;
  std::size_t stage = 0;           // n_*, the length of g
  double excursion_bound = 0.0;    // rho * C_d + |b| for the reordered block
  double max_excursion = 0.0;      // realized max block prefix norm
};

// One extension step: returns (g, d+1, delta) <= c with {0..n-1} inside both
// dom(g) and range(g) and delta < 1/n (no 1/n cap when n == 0). Throws
// PreconditionViolation when c is not a condition, InfeasibleEta when c's
// tail requirement has no room below eps, BudgetExhausted when the chase fails.
ExtendStep extend(const Condition& c, std::size_t n, const FamilyVector& fam, const TargetVector& targets,
                  const ExtendOptions& options = {});

struct CertificateChain {
  TargetVector targets;
  std::vector<Condition> conditions;
  std::vector<OrderEvidence> checks;  // checks[i]: conditions[i+1] <= conditions[i]
};

// (empty, 1, eps0) with eps0 = max(|x_0|, C_1 * sup_m |a^0_m|) + 1, rounded
// up to a multiple of 1/64.
Condition initial_condition(const FamilyVector& fam, const TargetVector& targets,
                            const ConstantSchedule* schedule = nullptr);

struct RunResult {
  CertificateChain chain;
  PrefixPlan plan;  // the last condition's injection, measured on its d coordinates
};

// Thrown by run() when an extension step fails; carries the chain so far.
class ChainInterrupted : public Error {
 public:
  ChainInterrupted(const std::string& what, CertificateChain partial, bool budget)
      : Error(what), partial_(std::move(partial)), budget_(budget) {}
  const CertificateChain& partial() const { return partial_; }
  bool budget_exhausted() const { return budget_; }

 private:
  CertificateChain partial_;
  bool budget_;
};

// Descending chain of rounds+1 conditions; round n extends with coverage n
// and seed options.seed + n.
RunResult run(const FamilyVector& fam, const TargetVector& targets, std::size_t rounds,
              const ExtendOptions& options = {});

}  // namespace rearrange

#endif  // REARRANGE_FORCING_HPP_
