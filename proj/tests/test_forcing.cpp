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
#include <set>
#include <vector>

#include <doctest.h>

#include "rearrange/errors.hpp"
#include "rearrange/forcing.hpp"

using namespace rearrange;

namespace {

using S = SeriesSpec;

FamilyVector rademacher_family(unsigned levels) {
  FamilyVector fam;
  for (unsigned i = 0; i < levels; ++i) fam.specs.push_back(S::rademacher_harmonic(i));
  return fam;
}

bool covers(const std::vector<std::size_t>& f, std::size_t n) {
  const std::set<std::size_t> range(f.begin(), f.end());
  for (std::size_t m = 0; m < n; ++m) {
    if (range.count(m) == 0) return false;
  }
  return f.size() >= n;
}

}  // namespace

TEST_SUITE("forcing") {

TEST_CASE("exact fractions") {
  CHECK(to_fraction(Rational(6, 8)) == "3/4");
  CHECK(to_fraction(Rational(5)) == "5/1");
  CHECK(parse_fraction("6/8") == Rational(3, 4));
  CHECK(parse_fraction("-7/2") == Rational(-7, 2));
  CHECK(parse_fraction("12") == Rational(12));
  CHECK_THROWS_AS(parse_fraction("0.5"), ParseError);
  CHECK_THROWS_AS(parse_fraction("1/0"), ParseError);
  CHECK_THROWS_AS(parse_fraction("a/3"), ParseError);
  CHECK(to_double(Rational(1, 64)) == 0.015625);
}

TEST_CASE("is_condition examples") {
  FamilyVector fam{{S::power_alternating(1.0)}};
  const TargetVector x{0.5};
  // eps above |x_0| and above C_1 * sup |a_m| = 2.
  const auto ok = is_condition(Condition{{}, 1, Rational(3)}, fam, x);
  CHECK(ok.holds());
  CHECK(ok.deviation == doctest::Approx(0.5));

  const auto small = is_condition(Condition{{}, 1, Rational(1, 2)}, fam, x);
  CHECK_FALSE(small.deviation_ok);
  CHECK(small.first_failure() == "partial sum is not within eps of the targets");

  // f skips index 0, whose term 1 is not below eps / C_1 = 1.
  const auto tail = is_condition(Condition{{1, 2}, 1, Rational(2)}, fam, TargetVector{-0.8});
  CHECK(tail.deviation_ok);
  CHECK_FALSE(tail.tail_ok);
  CHECK(tail.max_unused_norm == 1.0);

  CHECK_FALSE(is_condition(Condition{{0, 0}, 1, Rational(3)}, fam, x).injective);
  CHECK_FALSE(is_condition(Condition{{}, 2, Rational(3)}, fam, x).dimension_ok);
  CHECK_FALSE(is_condition(Condition{{}, 1, Rational(-1)}, fam, x).eps_positive);
}

TEST_CASE("leq examples") {
  const auto fam = rademacher_family(2);
  const Condition c{{0, 1, 2}, 1, Rational(3, 2)};
  const auto self = leq(c, c, fam);
  CHECK(self.holds());
  CHECK(self.block_norm == 0.0);

  const Condition lower{{0, 1, 2, 3}, 1, Rational(1, 2)};
  CHECK_FALSE(leq(lower, Condition{{0, 1, 2}, 2, Rational(3, 2)}, fam).dimension_ok);
  CHECK_FALSE(leq(Condition{{0, 2, 1, 3}, 2, Rational(1, 2)}, c, fam).extends);
  // Block sum 1/5 in coordinate 0: 2 delta + 1/5 <= 3 needs delta <= 7/5.
  CHECK(leq(Condition{{0, 1, 2, 4}, 2, Rational(11, 8)}, c, fam).shrink_ok);
  CHECK_FALSE(leq(Condition{{0, 1, 2, 4}, 2, Rational(3, 2)}, c, fam).shrink_ok);
}

TEST_CASE("initial condition") {
  const auto fam = rademacher_family(2);
  const Condition c = initial_condition(fam, TargetVector{0.1, 0.0});
  CHECK(c.f.empty());
  CHECK(c.d == 1);
  CHECK(c.eps == Rational(3));
  CHECK(is_condition(c, fam, TargetVector{0.1, 0.0}).holds());
  CHECK(initial_condition(fam, TargetVector{-4.3, 0.0}).eps == Rational(4 * 64 + 20, 64) + 1);
}

TEST_CASE("extend one step") {
  const auto fam = rademacher_family(2);
  const TargetVector x{0.2, -0.3};
  const Condition c0 = initial_condition(fam, x);
  ExtendOptions opts;
  opts.seed = 5;

  const ExtendStep two = extend(c0, 2, fam, x, opts);
  CHECK(two.condition.d == 2);
  CHECK(two.condition.eps < Rational(1, 2));
  CHECK(is_condition(two.condition, fam, x).holds());
  CHECK(leq(two.condition, c0, fam).holds());
  CHECK(covers(two.condition.f, 2));
  CHECK(two.eta < c0.eps);
  CHECK(two.max_excursion <= two.excursion_bound + 1e-9);
  CHECK(extend(c0, 2, fam, x, opts).condition == two.condition);

  const ExtendStep one = extend(c0, 1, fam, x, opts);
  CHECK(one.condition.eps < Rational(1));
  CHECK(covers(one.condition.f, 1));

  CHECK_THROWS_AS(extend(Condition{{}, 1, Rational(1, 100)}, 1, fam, x, opts), PreconditionViolation);
  CHECK_THROWS_AS(extend(two.condition, 3, fam, x, opts), InvalidInput);
}

TEST_CASE("run builds a descending chain") {
  const auto fam = rademacher_family(3);
  const TargetVector x{0.1, -0.2, 0.3};
  ExtendOptions opts;
  opts.seed = 9;

  const auto zero = run(fam, x, 0, opts);
  REQUIRE(zero.chain.conditions.size() == 1);
  CHECK(zero.chain.conditions[0] == initial_condition(fam, x));
  CHECK(zero.chain.checks.empty());

  const auto r = run(fam, x, 2, opts);
  const auto& cs = r.chain.conditions;
  REQUIRE(cs.size() == 3);
  REQUIRE(r.chain.checks.size() == 2);
  for (std::size_t n = 0; n < cs.size(); ++n) {
    CHECK(cs[n].d == n + 1);
    CHECK(is_condition(cs[n], fam, x).holds());
    if (n >= 1) {
      CHECK(cs[n].eps < Rational(1, n));
      CHECK(cs[n].eps < cs[n - 1].eps);
      CHECK(covers(cs[n].f, n));
      CHECK(r.chain.checks[n - 1].holds());
      CHECK(leq(cs[n], cs[n - 1], fam).holds());
    }
  }
  CHECK(r.plan.injection == cs.back().f);
  CHECK(r.plan.deviation < to_double(cs.back().eps));

  CHECK_THROWS_AS(run(fam, x, 3, opts), InvalidInput);
}

}  // TEST_SUITE
