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

#include "rearrange/rearranger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "rearrange/confinement.hpp"
#include "rearrange/vector_list.hpp"

namespace rearrange {
namespace {

constexpr std::size_t kMaxRounds = 20'000;
constexpr unsigned kMaxClassLevel = 10;
// Members past the target dimension whose sign levels still split the
// residue classes. Splitting spreads the allocation evenly over classes that
// differ only in those members, so their partial sums do not drift while the
// leading coordinates are chased.
constexpr std::size_t kClassLookahead = 2;

std::size_t class_period(const FamilyVector& fam, std::size_t d) {
  unsigned level = 0;
  for (std::size_t i = 0; i < std::min(fam.size(), d + kClassLookahead); ++i) {
    level = std::max(level, max_sign_level(fam[i]));
  }
  return std::size_t{2} << std::min(level, kMaxClassLevel);
}

struct AttemptFailed {
  std::string reason;
};

// Nonnegative weights lambda with sum_c lambda_c * dirs_c = r minimizing
// sum_c cost_c * lambda_c^2. Solved through the dual:
// lambda_c = max(0, <e_c, nu>) / cost_c, with nu minimizing
// 0.5 sum_c max(0, <e_c, nu>)^2 / cost_c - <r, nu> by damped semismooth Newton.
std::vector<double> allocate(const std::vector<Eigen::VectorXd>& dirs, const std::vector<double>& cost,
                             const Eigen::VectorXd& r) {
  const auto d = r.size();
  std::vector<double> lambda(dirs.size(), 0.0);
  if (dirs.empty()) return lambda;
  auto weights = [&](const Eigen::VectorXd& nu) {
    for (std::size_t c = 0; c < dirs.size(); ++c) lambda[c] = std::max(0.0, dirs[c].dot(nu)) / cost[c];
  };
  auto objective = [&](const Eigen::VectorXd& nu) {
    double v = -r.dot(nu);
    for (std::size_t c = 0; c < dirs.size(); ++c) {
      const double t = std::max(0.0, dirs[c].dot(nu));
      v += 0.5 * t * t / cost[c];
    }
    return v;
  };
  Eigen::VectorXd nu = r;
  const double scale = 1.0 + r.norm();
  for (int iter = 0; iter < 100; ++iter) {
    weights(nu);
    Eigen::VectorXd grad = -r;
    Eigen::MatrixXd hess = Eigen::MatrixXd::Identity(d, d) * 1e-12;
    for (std::size_t c = 0; c < dirs.size(); ++c) {
      if (lambda[c] > 0.0) {
        grad += lambda[c] * dirs[c];
        hess += dirs[c] * dirs[c].transpose() / cost[c];
      }
    }
    if (grad.norm() <= 1e-14 * scale) break;
    const Eigen::VectorXd step = -hess.ldlt().solve(grad);
    const double f0 = objective(nu);
    const double slope = grad.dot(step);
    double t = 1.0;
    while (t > 1e-12 && objective(nu + t * step) > f0 + 1e-4 * t * slope) t *= 0.5;
    nu += t * step;
  }
  weights(nu);
  return lambda;
}

class ChaseState {
 public:
  ChaseState(const FamilyVector& fam, std::size_t d, const PrefixPlan& base)
      : fam_(fam), d_(d), injection_(base.injection), sum_(d, 0.0), term_(d) {
    for (std::size_t m : injection_) {
      mark(m);
      add_term(m);
    }
  }

  bool used(std::size_t m) const { return m < used_.size() && used_[m] != 0; }

  const std::vector<double>& sum() const { return sum_; }
  const std::vector<std::size_t>& injection() const { return injection_; }

  std::size_t frontier() const {
    std::size_t m = 0;
    while (used(m)) ++m;
    return m;
  }

  std::span<const double> term_at(std::size_t m) {
    vector_term(fam_, m, term_);
    return term_;
  }

  // Appends `block` (ascending, all unused) ordered by anchored confinement.
  void append_block(const std::vector<std::size_t>& block) {
    if (block.empty()) return;
    std::vector<std::size_t> order(block.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (block.size() > 1 && d_ > 0) {
      VectorList vs(d_);
      vs.reserve(block.size());
      double rho = 0.0;
      for (std::size_t m : block) {
        const auto t = term_at(m);
        vs.push_back(t);
        rho = std::max(rho, norm(t));
      }
      if (rho > 0.0) order = confine_with_anchor(vs, sum_of(vs), rho).permutation;
    }
    for (std::size_t i : order) {
      const std::size_t m = block[i];
      injection_.push_back(m);
      mark(m);
      add_term(m);
    }
  }

 private:
  void mark(std::size_t m) {
    if (m >= used_.size()) used_.resize(std::max(m + 1, used_.size() * 2), 0);
    used_[m] = 1;
  }
  void add_term(std::size_t m) {
    vector_term(fam_, m, term_);
    for (std::size_t j = 0; j < d_; ++j) sum_[j] += term_[j];
  }

  const FamilyVector& fam_;
  std::size_t d_;
  std::vector<std::size_t> injection_;
  std::vector<char> used_;
  std::vector<double> sum_;
  std::vector<double> term_;
};

double residual_norm(const std::vector<double>& sum, const TargetVector& target) {
  double sq = 0.0;
  for (std::size_t j = 0; j < target.size(); ++j) sq += (target[j] - sum[j]) * (target[j] - sum[j]);
  return std::sqrt(sq);
}

// Smallest m with tail_sup_bound(fam, m, d) <= level.
std::size_t tail_index(const FamilyVector& fam, std::size_t d, double level, std::size_t budget) {
  if (tail_sup_bound(fam, 0, d) <= level) return 0;
  std::size_t hi = 1;
  while (tail_sup_bound(fam, hi, d) > level) {
    if (hi > budget) throw AttemptFailed{"tail target needs indices beyond the budget"};
    hi *= 2;
  }
  std::size_t lo = hi / 2;  // bound(lo) > level
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (tail_sup_bound(fam, mid, d) <= level ? hi : lo) = mid;
  }
  return hi;
}

PrefixPlan chase_attempt(const FamilyVector& fam, const PrefixPlan& base, const TargetVector& target,
                         const ChaseOptions& options, std::size_t need_cover, const std::vector<double>& jitter) {
  // Steered coordinates join the allocation but not the stopping rule.
  TargetVector full = target;
  for (std::size_t j = 0; j < options.steer.size() && full.size() < fam.size(); ++j) full.push_back(options.steer[j]);
  const std::size_t d = full.size();
  ChaseState state(fam, d, base);

  std::vector<std::size_t> cover;
  for (std::size_t m = 0; m < need_cover; ++m) {
    if (!state.used(m)) cover.push_back(m);
  }
  state.append_block(cover);

  const std::size_t period = class_period(fam, d);

  const std::size_t start = std::max(need_cover, state.frontier());
  std::vector<std::size_t> ptr(period);
  auto seat = [&](std::size_t c, std::size_t floor) {
    std::size_t m = floor + ((c + period - floor % period) % period);
    while (state.used(m)) m += period;
    ptr[c] = m;
  };
  for (std::size_t c = 0; c < period; ++c) seat(c, start);

  double last = residual_norm(state.sum(), full);
  for (std::size_t round = 0; round < kMaxRounds; ++round) {
    if (residual_norm(state.sum(), target) < options.eps) {
      return measure_plan(fam, state.injection(), target, base.injection.size());
    }

    Eigen::VectorXd r(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) r[static_cast<Eigen::Index>(j)] = full[j] - state.sum()[j];

    std::vector<Eigen::VectorXd> dirs;
    std::vector<double> cost;
    std::vector<std::size_t> owner;
    const double nearest = static_cast<double>(*std::min_element(ptr.begin(), ptr.end()) + 1);
    for (std::size_t c = 0; c < period; ++c) {
      const auto t = state.term_at(ptr[c]);
      const double nt = norm(t);
      if (nt == 0.0) continue;
      Eigen::VectorXd e(static_cast<Eigen::Index>(d));
      for (std::size_t j = 0; j < d; ++j) e[static_cast<Eigen::Index>(j)] = t[j] / nt;
      dirs.push_back(std::move(e));
      cost.push_back(static_cast<double>(ptr[c] + 1) / nearest);
      owner.push_back(c);
    }
    const std::vector<double> lambda = allocate(dirs, cost, r);

    std::vector<std::size_t> block;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const std::size_t c = owner[k];
      const double want = lambda[k] * jitter[c];
      if (want <= 0.0) continue;
      double acc = 0.0;
      std::size_t m = ptr[c];
      while (true) {
        if (m >= options.budget) throw AttemptFailed{"index budget exhausted"};
        if (state.used(m)) {
          m += period;
          continue;
        }
        const auto t = state.term_at(m);
        double proj = 0.0;
        for (std::size_t j = 0; j < d; ++j) proj += t[j] * dirs[k][static_cast<Eigen::Index>(j)];
        if (proj <= 0.0 || acc + proj / 2.0 > want) break;
        acc += proj;
        block.push_back(m);
        m += period;
      }
      ptr[c] = m;
    }
    std::sort(block.begin(), block.end());
    state.append_block(block);

    const double now = residual_norm(state.sum(), full);
    if (block.empty() || now > 0.5 * last) {
      // Terms at the class pointers are too coarse for the residual: move on
      // to finer terms.
      const std::size_t floor = 2 * std::max<std::size_t>(1, *std::min_element(ptr.begin(), ptr.end()));
      if (floor >= options.budget) throw AttemptFailed{"index budget exhausted"};
      for (std::size_t c = 0; c < period; ++c) seat(c, std::max(floor, ptr[c]));
    }
    last = now;
  }
  throw AttemptFailed{"round limit reached"};
}

}  // namespace

std::vector<bool> PrefixPlan::used_set() const {
  std::vector<bool> used;
  for (std::size_t m : injection) {
    if (m >= used.size()) used.resize(m + 1, false);
    used[m] = true;
  }
  return used;
}

PrefixPlan measure_plan(const FamilyVector& fam, std::vector<std::size_t> injection, const TargetVector& target,
                        std::size_t anchor) {
  const std::size_t d = target.size();
  if (fam.size() < d) throw InvalidInput("measure_plan: family shorter than target");
  PrefixPlan plan;
  plan.injection = std::move(injection);
  plan.anchor = std::min(anchor, plan.injection.size());
  std::vector<double> sum(d, 0.0), at_anchor(d, 0.0), term_buf(d);
  for (std::size_t k = 0; k < plan.injection.size(); ++k) {
    if (k == plan.anchor) at_anchor = sum;
    vector_term(fam, plan.injection[k], term_buf);
    for (std::size_t j = 0; j < d; ++j) sum[j] += term_buf[j];
    if (k + 1 > plan.anchor) {
      double sq = 0.0;
      for (std::size_t j = 0; j < d; ++j) sq += (sum[j] - at_anchor[j]) * (sum[j] - at_anchor[j]);
      plan.max_excursion = std::max(plan.max_excursion, std::sqrt(sq));
    }
  }
  plan.deviation = residual_norm(sum, target);
  return plan;
}

PrefixPlan riemann_rearrange(const SeriesSpec& spec, double target, double eps, std::size_t budget) {
  if (!(eps > 0.0)) throw InvalidInput("riemann_rearrange: eps must be positive");
  if (!is_conditionally_convergent(spec)) {
    throw PreconditionViolation("riemann_rearrange: series is not conditionally convergent");
  }
  FamilyVector fam;
  fam.specs.push_back(std::make_shared<const SeriesSpec>(spec));
  const TargetVector tv{target};

  std::vector<std::size_t> injection;
  std::size_t pos = 0, neg = 0;
  double sum = 0.0;
  auto next_with_sign = [&](std::size_t& p, bool positive) {
    while (true) {
      if (p >= budget) {
        throw PlanBudgetExhausted("riemann_rearrange: budget exhausted", measure_plan(fam, injection, tv, 0));
      }
      const double a = term(spec, p);
      if (positive ? a > 0.0 : a < 0.0) return p++;
      ++p;
    }
  };
  while (!(std::abs(sum - target) < eps)) {
    const std::size_t m = next_with_sign(sum <= target ? pos : neg, sum <= target);
    injection.push_back(m);
    sum += term(spec, m);
  }
  return measure_plan(fam, std::move(injection), tv, 0);
}

PrefixPlan chase_target(const FamilyVector& fam, const PrefixPlan& base, const TargetVector& target,
                        const ChaseOptions& options) {
  const std::size_t d = target.size();
  if (!(options.eps > 0.0)) throw InvalidInput("chase_target: eps must be positive");
  if (fam.size() < d) throw InvalidInput("chase_target: family shorter than target");
  {
    auto sorted = base.injection;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw InvalidInput("chase_target: base injection repeats an index");
    }
  }

  std::size_t need_cover = options.cover_below;
  PrefixPlan best = measure_plan(fam, base.injection, target, base.injection.size());
  try {
    if (options.tail_target) {
      need_cover = std::max(need_cover, tail_index(fam, d, *options.tail_target, options.budget));
    }
  } catch (const AttemptFailed& failed) {
    throw PlanBudgetExhausted("chase_target: " + failed.reason, best);
  }

  const auto used = base.used_set();
  bool covered = true;
  for (std::size_t m = 0; m < need_cover && covered; ++m) covered = m < used.size() && used[m];
  if (covered && best.deviation < options.eps) return base;

  const std::size_t period = class_period(fam, d);

  std::string reason = "no restarts configured";
  const std::size_t attempts = std::max<std::size_t>(1, options.restarts);
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    std::vector<double> jitter(period, 1.0);
    if (attempt > 0) {
      std::mt19937_64 rng(options.seed + 0x9E3779B97F4A7C15ULL * attempt);
      std::uniform_real_distribution<double> dist(0.5, 1.0);
      for (double& j : jitter) j = dist(rng);
    }
    try {
      PrefixPlan plan = chase_attempt(fam, base, target, options, need_cover, jitter);
      if (plan.deviation < options.eps) return plan;
      if (plan.deviation < best.deviation) best = std::move(plan);
    } catch (const AttemptFailed& failed) {
      reason = failed.reason;
    }
  }
  throw PlanBudgetExhausted("chase_target: " + reason, best);
}

PrefixPlan cover_indices(const FamilyVector& fam, const PrefixPlan& plan, const TargetVector& target,
                         std::size_t n) {
  const auto used = plan.used_set();
  std::vector<std::size_t> missing;
  for (std::size_t m = 0; m < n; ++m) {
    if (m >= used.size() || !used[m]) missing.push_back(m);
  }
  if (missing.empty()) return plan;
  const std::size_t d = target.size();
  std::vector<std::size_t> injection = plan.injection;
  std::vector<std::size_t> order(missing.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (d > 0 && missing.size() > 1) {
    VectorList vs(d);
    std::vector<double> t(d);
    double rho = 0.0;
    for (std::size_t m : missing) {
      vector_term(fam, m, t);
      vs.push_back(t);
      rho = std::max(rho, norm(t));
    }
    if (rho > 0.0) order = confine_with_anchor(vs, sum_of(vs), rho).permutation;
  }
  for (std::size_t i : order) injection.push_back(missing[i]);
  return measure_plan(fam, std::move(injection), target, plan.injection.size());
}

PrefixReport verify_prefix(const FamilyVector& fam, const PrefixPlan& plan, const TargetVector& target,
                           std::size_t d) {
  PrefixReport report;
  d = std::min({d, target.size(), fam.size()});
  {
    std::vector<std::size_t> sorted = plan.injection;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      report.injective = false;
      report.failures.push_back("injection repeats an index");
    }
  }

  // Coordinate-at-a-time resummation straight from the term formulas.
  std::vector<std::vector<double>> running(d, std::vector<double>(plan.injection.size() + 1, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < plan.injection.size(); ++k) {
      s += term(fam[i], plan.injection[k]);
      running[i][k + 1] = s;
    }
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = running[i][plan.injection.size()] - target[i];
    sq += diff * diff;
  }
  report.deviation = std::sqrt(sq);
  const std::size_t anchor = std::min(plan.anchor, plan.injection.size());
  for (std::size_t k = anchor; k <= plan.injection.size(); ++k) {
    double e = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = running[i][k] - running[i][anchor];
      e += diff * diff;
    }
    report.max_excursion = std::max(report.max_excursion, std::sqrt(e));
  }

  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
  if (!close(report.deviation, plan.deviation)) {
    report.failures.push_back("recorded deviation does not match recomputation");
  }
  if (!close(report.max_excursion, plan.max_excursion)) {
    report.failures.push_back("recorded max excursion does not match recomputation");
  }
  report.ok = report.failures.empty();
  return report;
}

}  // namespace rearrange
