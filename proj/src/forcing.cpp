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

#include "rearrange/forcing.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "rearrange/errors.hpp"
#include "rearrange/vector_list.hpp"

namespace rearrange {
namespace {

using boost::multiprecision::cpp_int;

const ConstantSchedule& schedule_or_default(const ConstantSchedule* s) {
  return s != nullptr ? *s : published_schedule();
}

// Largest first-d-coordinate norm among unused m < cutoff, and the envelope
// bounding every m >= cutoff.
std::pair<double, double> unused_tail(const std::vector<std::size_t>& f, const FamilyVector& fam, std::size_t d,
                                      std::size_t cutoff) {
  std::vector<bool> used(cutoff, false);
  for (std::size_t m : f) {
    if (m < cutoff) used[m] = true;
  }
  std::vector<double> t(d);
  double worst = 0.0;
  for (std::size_t m = 0; m < cutoff; ++m) {
    if (used[m]) continue;
    vector_term(fam, m, t);
    worst = std::max(worst, norm(t));
  }
  return {worst, tail_sup_bound(fam, cutoff, d)};
}

}  // namespace

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_fraction(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

Rational parse_fraction(const std::string& text) {
  auto integer = [&](const std::string& s) {
    const std::size_t digits_from = (!s.empty() && s[0] == '-') ? 1 : 0;
    if (s.size() == digits_from ||
        !std::all_of(s.begin() + static_cast<std::ptrdiff_t>(digits_from), s.end(),
                     [](unsigned char ch) { return std::isdigit(ch) != 0; })) {
      throw ParseError("not an exact fraction: '" + text + "'", 0, 0);
    }
    return cpp_int(s);
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(integer(text));
  const cpp_int den = integer(text.substr(slash + 1));
  if (den <= 0) throw ParseError("fraction denominator must be positive: '" + text + "'", 0, 0);
  return Rational(integer(text.substr(0, slash)), den);
}

bool ConditionEvidence::holds() const {
  return injective && dimension_ok && eps_positive && deviation_ok && tail_ok;
}

std::string ConditionEvidence::first_failure() const {
  if (!injective) return "f is not an injection";
  if (!dimension_ok) return "d is not a positive dimension within the family";
  if (!eps_positive) return "eps is not positive";
  if (!deviation_ok) return "partial sum is not within eps of the targets";
  if (!tail_ok) return "an unused term is not below eps / C_d";
  return {};
}

ConditionEvidence is_condition(const Condition& c, const FamilyVector& fam, const TargetVector& targets,
                               const ConditionOptions& options) {
  ConditionEvidence ev;
  {
    auto sorted = c.f;
    std::sort(sorted.begin(), sorted.end());
    ev.injective = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  }
  ev.dimension_ok = c.d >= 1 && c.d <= fam.size() && c.d <= targets.size();
  ev.eps_positive = c.eps > 0;
  if (!ev.dimension_ok) return ev;

  const std::size_t d = c.d;
  const double eps = to_double(c.eps);
  std::vector<double> sum(d, 0.0), t(d);
  for (std::size_t m : c.f) {
    vector_term(fam, m, t);
    for (std::size_t j = 0; j < d; ++j) sum[j] += t[j];
  }
  for (std::size_t j = 0; j < d; ++j) sum[j] -= targets[j];
  ev.deviation = norm(sum);
  ev.deviation_ok = ev.deviation < eps - options.slack;

  ev.cutoff = options.cutoff.value_or(c.f.size() + kExactTailWindow);
  std::tie(ev.max_unused_norm, ev.tail_envelope) = unused_tail(c.f, fam, d, ev.cutoff);
  ev.tail_threshold = eps / schedule_or_default(options.schedule).at(d);
  ev.tail_ok = ev.max_unused_norm < ev.tail_threshold - options.slack &&
               ev.tail_envelope < ev.tail_threshold - options.slack;
  return ev;
}

bool OrderEvidence::holds() const { return extends && dimension_ok && envelope_ok && shrink_ok; }

std::string OrderEvidence::first_failure() const {
  if (!extends) return "g does not extend f";
  if (!dimension_ok) return "e is smaller than d";
  if (!envelope_ok) return "a block prefix sum reaches 2 eps";
  if (!shrink_ok) return "2 delta + |block sum| exceeds 2 eps";
  return {};
}

OrderEvidence leq(const Condition& lower, const Condition& upper, const FamilyVector& fam, double slack) {
  OrderEvidence ev;
  const auto& g = lower.f;
  const auto& f = upper.f;
  ev.extends = g.size() >= f.size() && std::equal(f.begin(), f.end(), g.begin());
  ev.dimension_ok = lower.d >= upper.d;

  const std::size_t d = std::min(upper.d, fam.size());
  std::vector<double> block(d, 0.0), t(d);
  for (std::size_t k = f.size(); k < g.size(); ++k) {
    vector_term(fam, g[k], t);
    for (std::size_t j = 0; j < d; ++j) block[j] += t[j];
    ev.max_block_prefix_norm = std::max(ev.max_block_prefix_norm, norm(block));
  }
  const double two_eps = 2.0 * to_double(upper.eps);
  ev.envelope_ok = ev.max_block_prefix_norm < two_eps - slack;
  ev.block_norm = norm(block);
  ev.two_delta_plus_block = 2.0 * to_double(lower.eps) + ev.block_norm;
  ev.shrink_ok = ev.two_delta_plus_block <= two_eps;
  return ev;
}

ExtendStep extend(const Condition& c, std::size_t n, const FamilyVector& fam, const TargetVector& targets,
                  const ExtendOptions& options) {
  const ConstantSchedule& schedule = schedule_or_default(options.schedule);
  ConditionOptions copts;
  copts.slack = options.slack;
  copts.schedule = &schedule;
  const ConditionEvidence base = is_condition(c, fam, targets, copts);
  if (!base.holds()) throw PreconditionViolation("extend: input is not a condition: " + base.first_failure());
  const std::size_t d = c.d;
  if (fam.size() < d + 1 || targets.size() < d + 1) {
    throw InvalidInput("extend: family and targets must reach dimension d+1");
  }
  const double slack = options.slack;
  const double c_d = schedule.at(d);
  const double c_next = schedule.at(d + 1);

  // eta = eps (1 - 2^-t) for the smallest t that still bounds every unused
  // term by eta / C_d.
  const double unused = std::max(base.max_unused_norm, base.tail_envelope);
  std::optional<Rational> eta;
  for (unsigned t = 1; t <= 20 && !eta; ++t) {
    const Rational candidate = c.eps * (1 - Rational(1, cpp_int(1) << t));
    if (unused < to_double(candidate) / c_d - slack) eta = candidate;
  }
  if (!eta) throw InfeasibleEta("extend: no eta < eps bounds the unused terms");

  Rational delta = (c.eps - *eta) / 2;
  if (n > 0) delta = std::min(delta, Rational(1, n));
  delta = delta * Rational(7, 8);
  const double eps_d = to_double(c.eps);
  const double delta_d = to_double(delta);

  const TargetVector x(targets.begin(), targets.begin() + static_cast<std::ptrdiff_t>(d + 1));
  PrefixPlan base_plan;
  base_plan.injection = c.f;
  base_plan.anchor = c.f.size();
  ChaseOptions chase;
  chase.eps = 0.5 * std::min(delta_d, eps_d - base.deviation);
  chase.seed = options.seed;
  chase.budget = options.budget;
  chase.restarts = options.restarts;
  chase.cover_below = n;
  chase.tail_target = 0.5 * delta_d / c_next;
  chase.steer.assign(targets.begin() + static_cast<std::ptrdiff_t>(d + 1), targets.end());
  const PrefixPlan p = chase_target(fam, base_plan, x, chase);

  // Stage n_* >= max(n, |f|) must meet four requirements: coverage of n,
  // first-d block sum < eps, (d+1)-deviation < delta / 2, and every unused
  // term below delta / C_{d+1}. Half of delta is kept back so the next
  // extension does not start at the edge of its tolerance. The whole chase is
  // preferred when it qualifies, since its tail also carries the steering of
  // later coordinates; otherwise the shortest qualifying stage is used.
  std::vector<double> sum(d + 1, 0.0), at_f(d, 0.0), t(d + 1);
  std::vector<bool> used;
  std::size_t frontier = 0;
  auto advance = [&](std::size_t k) {
    const std::size_t m = p.injection[k];
    if (m >= used.size()) used.resize(std::max(m + 1, 2 * used.size()), false);
    used[m] = true;
    while (frontier < used.size() && used[frontier]) ++frontier;
    vector_term(fam, m, t);
    for (std::size_t j = 0; j <= d; ++j) sum[j] += t[j];
  };
  const std::size_t first = std::max(n, c.f.size());
  std::optional<std::size_t> stage;
  bool whole = false;
  for (std::size_t k = 0; k <= p.injection.size(); ++k) {
    if (k == c.f.size()) std::copy(sum.begin(), sum.begin() + static_cast<std::ptrdiff_t>(d), at_f.begin());
    if (k >= first) {
      double block_sq = 0.0, dev_sq = 0.0;
      for (std::size_t j = 0; j < d; ++j) block_sq += (sum[j] - at_f[j]) * (sum[j] - at_f[j]);
      for (std::size_t j = 0; j <= d; ++j) dev_sq += (sum[j] - x[j]) * (sum[j] - x[j]);
      const bool ok = frontier >= n && std::sqrt(block_sq) < eps_d - slack &&
                      std::sqrt(dev_sq) < 0.5 * delta_d - slack &&
                      tail_sup_bound(fam, frontier, d + 1) < delta_d / c_next - slack;
      if (ok && !stage) stage = k;
      if (k == p.injection.size()) whole = ok;
    }
    if (k < p.injection.size()) advance(k);
  }
  if (whole) stage = p.injection.size();
  if (!stage) throw BudgetExhausted("extend: chase ended before any stage met the extension requirements");

  // Reorder the new block so its first-d partial sums stay confined.
  const std::vector<std::size_t> block(p.injection.begin() + static_cast<std::ptrdiff_t>(c.f.size()),
                                       p.injection.begin() + static_cast<std::ptrdiff_t>(*stage));
  ExtendStep step;
  step.condition.f = c.f;
  step.condition.d = d + 1;
  step.condition.eps = delta;
  step.eta = *eta;
  step.stage = *stage;
  if (!block.empty()) {
    VectorList vs(d);
    vs.reserve(block.size());
    std::vector<double> td(d);
    double rho = 0.0;
    for (std::size_t m : block) {
      vector_term(fam, m, td);
      vs.push_back(td);
      rho = std::max(rho, norm(td));
    }
    std::vector<std::size_t> order(block.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (rho > 0.0) {
      ConfineOptions conf;
      conf.schedule = &schedule;
      const ConfinementResult confined = confine_with_anchor(vs, sum_of(vs), rho, conf);
      order = confined.permutation;
      step.excursion_bound = confined.bound_used;
      step.max_excursion = confined.max_prefix_norm;
    }
    for (std::size_t i : order) step.condition.f.push_back(block[i]);
  }

  const ConditionEvidence after = is_condition(step.condition, fam, targets, copts);
  if (!after.holds()) throw Error("extend: result is not a condition: " + after.first_failure());
  const OrderEvidence link = leq(step.condition, c, fam, slack);
  if (!link.holds()) throw Error("extend: result does not extend the input: " + link.first_failure());
  return step;
}

Condition initial_condition(const FamilyVector& fam, const TargetVector& targets, const ConstantSchedule* schedule) {
  if (fam.size() == 0 || targets.empty()) throw InvalidInput("initial_condition: empty family or targets");
  const double c1 = schedule_or_default(schedule).at(1);
  const double base = std::max(std::abs(targets[0]), c1 * tail_sup_bound(fam[0], 0));
  Condition c;
  c.d = 1;
  c.eps = Rational(cpp_int(static_cast<long long>(std::ceil(base * 64.0))), 64) + 1;
  return c;
}

RunResult run(const FamilyVector& fam, const TargetVector& targets, std::size_t rounds,
              const ExtendOptions& options) {
  if (fam.size() < rounds + 1 || targets.size() < rounds + 1) {
    throw InvalidInput("run: family and targets need rounds + 1 entries");
  }
  RunResult result;
  result.chain.targets = targets;
  result.chain.conditions.push_back(initial_condition(fam, targets, options.schedule));
  for (std::size_t n = 1; n <= rounds; ++n) {
    ExtendOptions round = options;
    round.seed = options.seed + n;
    try {
      ExtendStep step = extend(result.chain.conditions.back(), n, fam, targets, round);
      result.chain.checks.push_back(leq(step.condition, result.chain.conditions.back(), fam, options.slack));
      result.chain.conditions.push_back(std::move(step.condition));
    } catch (const BudgetExhausted& e) {
      throw ChainInterrupted(std::string("run: round ") + std::to_string(n) + ": " + e.what(), result.chain, true);
    } catch (const Error& e) {
      throw ChainInterrupted(std::string("run: round ") + std::to_string(n) + ": " + e.what(), result.chain, false);
    }
  }
  const Condition& last = result.chain.conditions.back();
  const TargetVector active(targets.begin(), targets.begin() + static_cast<std::ptrdiff_t>(last.d));
  result.plan = measure_plan(fam, last.f, active, 0);
  return result;
}

}  // namespace rearrange
