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

// Attainable-sum algebra for families of series.
//
// K is the set of coefficient vectors s (finite support) for which
// sum_i s_i a^i converges absolutely; R is its orthogonal complement. The
// rearrangement sums of a finite family form the affine set
// (sum a^0, ..., sum a^{d-1}) + R.
//
// For the closed-form families of series.hpp, K is computed exactly: two
// series differ by an absolutely convergent one precisely when their
// oscillating generator coefficients agree, so K is the null space of the
// generator-coefficient matrix. A numerical growth test cross-checks it.

#ifndef REARRANGE_SUBSPACE_HPP_
#define REARRANGE_SUBSPACE_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rearrange/series.hpp"

namespace rearrange {

struct CoefficientVector {
  std::vector<std::size_t> support;
  std::vector<double> values;  // nonzero, aligned with support

  static CoefficientVector from_dense(std::span<const double> dense);
  std::vector<double> dense(std::size_t d) const;
  double dot(std::span<const double> x) const;
};

enum class GrowthVerdict { kDivergent, kMember, kInconclusive };
std::string to_string(GrowthVerdict v);

// Absolute partial sums A(N) = sum_{m<N} |<s, a_m>| sampled at N/4, N/2, N.
// For a non-member the increments over [N/4, N/2) and [N/2, N) are equal or
// growing (logarithmic or faster divergence); for a member the later
// increment is a fixed fraction of the earlier one.
struct GrowthConfig {
  std::size_t truncation = std::size_t{1} << 18;
  double divergent_ratio = 0.99;  // increment ratio at or above: divergent
  double member_ratio = 0.95;     // increment ratio at or below: member
};

struct GrowthDiagnostic {
  std::vector<double> direction;  // scaled to max |s_i| = 1
  bool declared_member = false;
  double abs_sum_quarter = 0.0;
  double abs_sum_half = 0.0;
  double abs_sum_full = 0.0;
  double increment_ratio = 0.0;
  GrowthVerdict verdict = GrowthVerdict::kInconclusive;
};

GrowthDiagnostic growth_test(const FamilyVector& fam, std::span<const double> direction,
                             const GrowthConfig& config = {});

struct KSpaceAnalysis {
  std::vector<CoefficientVector> k_basis;
  std::vector<std::vector<double>> r_basis;
  std::vector<GrowthDiagnostic> diagnostics;
};

// Exact K basis of the first d members (one vector per free column of the
// reduced coefficient matrix, free coordinate 1, first nonzero entry
// positive), the R basis, and growth diagnostics for every basis vector.
// Throws DisagreementError when a declared K vector tests divergent or an R
// vector tests absolutely convergent.
KSpaceAnalysis analyze_k_space(const FamilyVector& fam, std::size_t d, const GrowthConfig& config = {});

std::vector<CoefficientVector> k_space_basis(const FamilyVector& fam, std::size_t d,
                                             const GrowthConfig& config = {});

// Orthonormal basis of the orthogonal complement of span(k_basis) in R^d.
std::vector<std::vector<double>> r_space(const std::vector<CoefficientVector>& k_basis, std::size_t d);

struct DependencyStructure {
  std::vector<std::size_t> independent;
  // j -> {(k, d^j_k)}, k in independent and k < j; sum_k d^j_k a^k + a^j
  // converges absolutely.
  std::map<std::size_t, std::vector<std::pair<std::size_t, double>>> coefficients;
  std::map<std::size_t, double> abs_sums;         // j -> c_j
  std::map<std::size_t, SeriesPtr> remainders;    // j -> sum_k d^j_k a^k + a^j

  bool is_dependent(std::size_t j) const { return coefficients.contains(j); }
};

// Greedy in family order: a member joins the independent set unless its
// generator coefficients are a combination of the members already there.
DependencyStructure dependency_decompose(const FamilyVector& fam, double precision = 1e-10);

// a^j rebuilt as remainder_j - sum_k d^j_k a^k.
SeriesPtr recompose(const DependencyStructure& s, const FamilyVector& fam, std::size_t j);

// c_j - sum_k d^j_k * achieved(k): the limit a dependent series must reach
// once each independent a^k converges to achieved(k).
double predicted_dependent_limit(const DependencyStructure& s, const std::map<std::size_t, double>& achieved,
                                 std::size_t j);

// True iff |<xbar, s>| <= tol for every K generator s.
bool membership_check(std::span<const double> xbar, const std::vector<CoefficientVector>& k_basis, double tol);

}  // namespace rearrange

#endif  // REARRANGE_SUBSPACE_HPP_
