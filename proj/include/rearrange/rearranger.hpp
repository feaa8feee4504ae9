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

// Finite-precision rearrangement of conditionally convergent series.
//
// A plan is a finite injection prefix: the first |injection| values of a
// permutation of the naturals. Its partial sums are read off the family's
// terms at those indices, in plan order.

#ifndef REARRANGE_REARRANGER_HPP_
#define REARRANGE_REARRANGER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rearrange/errors.hpp"
#include "rearrange/series.hpp"

namespace rearrange {

using TargetVector = std::vector<double>;

struct PrefixPlan {
  std::vector<std::size_t> injection;
  // Length of the prefix this plan was grown from; excursions are measured
  // from the partial sum at this position.
  std::size_t anchor = 0;
  double deviation = 0.0;      // |partial sum - target| over the active coordinates
  double max_excursion = 0.0;  // max over k >= anchor of |S_k - S_anchor|

  // Membership bitmap for the range of the injection.
  std::vector<bool> used_set() const;
  bool operator==(const PrefixPlan&) const = default;
};

// Thrown when a search runs out of budget; carries the best plan found.
class PlanBudgetExhausted : public BudgetExhausted {
 public:
  PlanBudgetExhausted(const std::string& what, PrefixPlan best)
      : BudgetExhausted(what), best_(std::move(best)) {}
  const PrefixPlan& best() const { return best_; }

 private:
  PrefixPlan best_;
};

// Classic Riemann greedy: while the running sum is <= target take the
// smallest unused positive term, otherwise the smallest unused negative term,
// stopping at the first prefix within eps of the target. `budget` caps the
// indices the search may touch. Throws PreconditionViolation when the spec is
// not conditionally convergent.
PrefixPlan riemann_rearrange(const SeriesSpec& spec, double target, double eps, std::size_t budget);

struct ChaseOptions {
  double eps = 1e-3;
  std::uint64_t seed = 0;
  std::size_t budget = 10'000'000;  // largest index the search may touch
  std::size_t cover_below = 0;      // every index < cover_below ends up used
  // When set, every index whose term envelope exceeds this is used too, so
  // all unused terms have norm <= tail_target.
  std::optional<double> tail_target;
  std::size_t restarts = 4;
  // Targets for the coordinates right after target.size(). They are pulled
  // toward these values while terms are still coarse, but reaching them is
  // not required.
  TargetVector steer;
};

// Extends `base` until the partial sum over the first target.size()
// coordinates is within eps of `target`. Works per residue class of the
// family's sign period: the residual is split across classes (minimum-norm
// nonnegative allocation) and each class runs a scalar chase along its own
// terms. Appended blocks are ordered with confine_with_anchor. Restarts
// jitter the allocation from `seed`; the first successful restart wins.
PrefixPlan chase_target(const FamilyVector& fam, const PrefixPlan& base, const TargetVector& target,
                        const ChaseOptions& options);

// Appends every missing index below n, ordered by confinement.
PrefixPlan cover_indices(const FamilyVector& fam, const PrefixPlan& plan, const TargetVector& target,
                         std::size_t n);

struct PrefixReport {
  bool ok = true;
  bool injective = true;
  double deviation = 0.0;
  double max_excursion = 0.0;
  std::vector<std::string> failures;
};

// Recomputes a plan's metrics from series terms and flags any mismatch.
PrefixReport verify_prefix(const FamilyVector& fam, const PrefixPlan& plan, const TargetVector& target,
                           std::size_t d);

// Partial sums, deviation and excursion of `injection` over the first d
// coordinates. Sums accumulate per coordinate in plan order.
PrefixPlan measure_plan(const FamilyVector& fam, std::vector<std::size_t> injection,
                        const TargetVector& target, std::size_t anchor);

}  // namespace rearrange

#endif  // REARRANGE_REARRANGER_HPP_
