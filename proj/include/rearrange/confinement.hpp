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

// Prefix-sum confinement (Steinitz-type reordering).
//
// Given vectors v_0..v_{n-1} in R^d with norms at most 1 and sum (close to)
// zero, find an ordering that keeps v_0 first and every prefix sum within
// the published constant C_d. The anchored variant handles a nonzero total b
// and norms up to rho, with bound rho * C_d + |b|.

#ifndef REARRANGE_CONFINEMENT_HPP_
#define REARRANGE_CONFINEMENT_HPP_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "rearrange/vector_list.hpp"

namespace rearrange {

// C_d for d >= 1. Explicit values cover d = 1..k; past k the schedule grows by
// one per dimension. Always nondecreasing and >= 1.
class ConstantSchedule {
 public:
  // C_d = d + 1.
  ConstantSchedule() = default;
  explicit ConstantSchedule(std::vector<double> values);

  // Comma-separated values for d = 1, 2, ...; throws ValidationError.
  static ConstantSchedule parse(std::string_view csv);
  // RL_CONSTANT_SCHEDULE if set, else the default.
  static ConstantSchedule from_environment();

  double at(std::size_t d) const;

 private:
  std::vector<double> values_;
};

// The process-wide schedule (read from the environment once).
const ConstantSchedule& published_schedule();
double published_constant(std::size_t d);

struct ConfinementResult {
  std::vector<std::size_t> permutation;  // input positions; permutation[0] == 0
  std::vector<double> prefix_norms;      // norm of each nonempty prefix sum
  double max_prefix_norm = 0.0;
  double bound_used = 0.0;
};

struct ConfineOptions {
  const ConstantSchedule* schedule = nullptr;  // null: published_schedule()
  // Greedy candidates per step, shared across sign-pattern groups of the
  // unused positions.
  std::size_t window = 128;
  std::size_t node_limit = 20'000'000;
};

// Orders zero-sum vectors (norms <= 1, |sum| <= tol) with position 0 first so
// every prefix norm is at most C_d + tol. Greedy minimum-norm choice with
// backtracking; ties go to the lowest input position. Throws
// PreconditionViolation, or BudgetExhausted if the node limit is reached.
ConfinementResult confine_zero_sum(const VectorList& vectors, double tol,
                                   const ConfineOptions& options = {});

// Anchored form: vectors sum to b, norms <= rho. Every prefix norm is at most
// rho * C_d + |b| (plus the rounding residual |sum - b|). When |b| > rho the
// anchor is split into ceil(|b| / rho) equal pieces, which keeps the bound.
ConfinementResult confine_with_anchor(const VectorList& vectors, std::span<const double> b,
                                      double rho, const ConfineOptions& options = {});

struct BruteForceResult {
  std::vector<std::size_t> ordering;
  double min_max_prefix_norm = 0.0;
};

inline constexpr std::size_t kBruteForceLimit = 10;

// Exact minimum over all (n-1)! orderings with position 0 first of the largest
// prefix norm. Throws SizeLimitExceeded for n > 10.
BruteForceResult brute_force_confine(const VectorList& vectors);

// Norms of the prefix sums of `vectors` taken in `order`.
std::vector<double> prefix_norms(const VectorList& vectors, std::span<const std::size_t> order);

}  // namespace rearrange

#endif  // REARRANGE_CONFINEMENT_HPP_
