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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "rearrange/confinement.hpp"
#include "rearrange/errors.hpp"

using namespace rearrange;

namespace {

std::vector<std::vector<double>> rows(const VectorList& vs) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < vs.size(); ++i) out.emplace_back(vs[i].begin(), vs[i].end());
  return out;
}

// n - k random vectors in the unit ball followed by the negated sum split
// into k equal pieces of norm at most 1. The head is shrunk when its sum is
// too long to split into the remaining slots.
VectorList zero_sum_instance(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  const std::size_t head = std::max<std::size_t>(1, n - 1 - (n > 4 ? n / 4 : 0));
  std::vector<std::vector<double>> vs;
  std::vector<double> total(d, 0.0);
  for (std::size_t i = 0; i < head; ++i) {
    std::vector<double> v(d);
    for (double& x : v) x = g(rng);
    const double len = norm(v), want = r(rng);
    for (double& x : v) x *= want / len;
    vs.push_back(v);
  }
  for (const auto& v : vs) {
    for (std::size_t j = 0; j < d; ++j) total[j] += v[j];
  }
  const double slots = static_cast<double>(n - head);
  if (norm(total) > slots) {
    const double shrink = slots / norm(total);
    for (auto& v : vs) {
      for (double& x : v) x *= shrink;
    }
    for (double& x : total) x *= shrink;
  }
  const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(norm(total) - 1e-12)));
  for (std::size_t p = 0; p < k; ++p) {
    std::vector<double> v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = -total[j] / static_cast<double>(k);
    vs.push_back(v);
  }
  VectorList out(d);
  for (const auto& v : vs) out.push_back(v);
  return out;
}

void check_fixed_first_permutation(const ConfinementResult& r, std::size_t n) {
  REQUIRE(r.permutation.size() == n);
  if (n > 0) CHECK(r.permutation[0] == 0);
  auto sorted = r.permutation;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < n; ++i) REQUIRE(sorted[i] == i);
}

}  // namespace

TEST_SUITE("confinement") {

TEST_CASE("published schedule") {
  ConstantSchedule sched;
  CHECK(sched.at(1) == 2.0);
  CHECK(sched.at(3) == 4.0);
  for (std::size_t d = 1; d <= 16; ++d) CHECK(sched.at(d + 1) >= sched.at(d));
  const auto custom = ConstantSchedule::parse("1.5, 2.5,3");
  CHECK(custom.at(1) == 1.5);
  CHECK(custom.at(3) == 3.0);
  CHECK(custom.at(5) == 5.0);
  CHECK_THROWS_AS(ConstantSchedule::parse("2,1"), ValidationError);
  CHECK_THROWS_AS(ConstantSchedule::parse("0.5"), ValidationError);
  CHECK_THROWS_AS(ConstantSchedule::parse("2,x"), ValidationError);
  CHECK(published_constant(2) == published_schedule().at(2));
}

TEST_CASE("confine_zero_sum examples") {
  const VectorList alt{{1.0}, {-1.0}, {1.0}, {-1.0}};
  const auto r = confine_zero_sum(alt, 1e-12);
  CHECK(r.permutation == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(r.prefix_norms == std::vector<double>{1.0, 0.0, 1.0, 0.0});
  CHECK(r.max_prefix_norm <= published_constant(1));

  const VectorList zeros{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
  CHECK(confine_zero_sum(zeros, 0.0).max_prefix_norm == 0.0);

  CHECK_THROWS_AS(confine_zero_sum(VectorList{{1.0}, {1.0}}, 1e-9), PreconditionViolation);
  CHECK_THROWS_AS(confine_zero_sum(VectorList{{2.0}, {-2.0}}, 1e-9), PreconditionViolation);
}

TEST_CASE("brute force oracle examples") {
  const VectorList cross{{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  const auto b = brute_force_confine(cross);
  CHECK(b.min_max_prefix_norm == doctest::Approx(1.0));
  CHECK(b.ordering == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(brute_force_confine(VectorList{{3.0, 4.0}}).min_max_prefix_norm == 5.0);
  CHECK(brute_force_confine(VectorList{{1.0}, {-1.0}}).min_max_prefix_norm == 1.0);
  VectorList big(1);
  for (int i = 0; i < 11; ++i) big.push_back(std::vector<double>{i % 2 ? 1.0 : -1.0});
  CHECK_THROWS_AS(brute_force_confine(big), SizeLimitExceeded);
}

TEST_CASE("property: oracle dominance on small instances") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 7);
    const std::size_t d = 1 + static_cast<std::size_t>(trial % 3);
    const auto vs = zero_sum_instance(rng, n, d);
    const auto r = confine_zero_sum(vs, 1e-9);
    check_fixed_first_permutation(r, vs.size());
    const auto best = brute_force_confine(vs);
    CHECK(best.min_max_prefix_norm <= r.max_prefix_norm + 1e-12);
    CHECK(r.max_prefix_norm <= r.bound_used);
    CHECK(r.max_prefix_norm == doctest::Approx(oracle::max_prefix_norm(rows(vs), r.permutation)));
  }
}

TEST_CASE("property: bound contract up to n = 64, d = 4") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<std::size_t> nn(2, 64), dd(1, 4);
    const auto vs = zero_sum_instance(rng, nn(rng), dd(rng));
    const auto r = confine_zero_sum(vs, 1e-9);
    check_fixed_first_permutation(r, vs.size());
    REQUIRE(r.max_prefix_norm <= r.bound_used);
    CHECK(r.bound_used == doctest::Approx(published_constant(vs.dim()) + 1e-9));
  }
}

TEST_CASE("property: rescaling equivariance") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto vs = zero_sum_instance(rng, 3 + static_cast<std::size_t>(trial % 40), 1 + trial % 4);
    const auto base = confine_zero_sum(vs, 1e-9);
    for (double lambda : {0.25, 0.5, 0.9}) {
      VectorList scaled(vs.dim(), vs.coords());
      for (std::size_t i = 0; i < scaled.size(); ++i) {
        for (double& x : scaled[i]) x *= lambda;
      }
      CHECK(confine_zero_sum(scaled, 1e-9 * lambda).permutation == base.permutation);
    }
  }
}

TEST_CASE("confine_with_anchor") {
  const std::vector<double> b{1.0};
  const auto r = confine_with_anchor(VectorList{{0.5}, {0.5}}, b, 1.0);
  CHECK(r.prefix_norms == std::vector<double>{0.5, 1.0});
  CHECK(r.max_prefix_norm <= published_constant(1) + 1.0);

  // b = 0 agrees with the zero-sum form after rescaling by rho.
  const VectorList vs{{0.4, 0.0}, {-0.7, 0.2}, {0.1, -0.6}, {0.2, 0.4}};
  const std::vector<double> zero{0.0, 0.0};
  const auto anchored = confine_with_anchor(vs, zero, 0.8);
  VectorList scaled(2, vs.coords());
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    for (double& x : scaled[i]) x /= 0.8;
  }
  CHECK(anchored.permutation == confine_zero_sum(scaled, 1e-12).permutation);

  CHECK_THROWS_AS(confine_with_anchor(VectorList{{2.0}}, std::vector<double>{2.0}, 1.0), PreconditionViolation);
  CHECK_THROWS_AS(confine_with_anchor(VectorList{{0.5}}, std::vector<double>{0.2}, 1.0), PreconditionViolation);
  CHECK_THROWS_AS(confine_with_anchor(VectorList{{0.5}}, std::vector<double>{0.5}, 0.0), PreconditionViolation);
}

TEST_CASE("property: anchored bound, including |b| above rho") {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double rho = std::vector<double>{0.5, 1.0, 2.0}[static_cast<std::size_t>(trial % 3)];
    const std::size_t d = 1 + static_cast<std::size_t>(trial % 3);
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 40);
    VectorList vs(d);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(d);
      for (double& x : v) x = g(rng);
      const double len = norm(v), want = rho * u(rng);
      for (double& x : v) x *= want / len;
      vs.push_back(v);
    }
    const auto b = sum_of(vs);
    const auto r = confine_with_anchor(vs, b, rho);
    check_fixed_first_permutation(r, n);
    for (double pn : r.prefix_norms) REQUIRE(pn <= rho * published_constant(d) + norm(b) + 1e-9);
  }
}

TEST_CASE("large sorted-direction input stays confined") {
  // Thousands of vectors arriving grouped by direction.
  VectorList vs(2);
  const std::size_t n = 4000;
  for (std::size_t i = 0; i < n; ++i) {
    const double len = 0.8 / (1.0 + static_cast<double>(i % 100));
    vs.push_back(std::vector<double>{i < n / 2 ? len : -len, i < n / 2 ? 0.5 * len : -0.5 * len});
  }
  const auto r = confine_zero_sum(vs, 1e-9);
  check_fixed_first_permutation(r, n);
  CHECK(r.max_prefix_norm <= r.bound_used);
}

}  // TEST_SUITE
