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

#include "rearrange/confinement.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>

#include "rearrange/errors.hpp"

namespace rearrange {
namespace {

constexpr double kRoundingSlack = 1e-12;

const ConstantSchedule& schedule_of(const ConfineOptions& options) {
  return options.schedule != nullptr ? *options.schedule : published_schedule();
}

// Depth-first search over orderings with position 0 fixed. Unused positions
// are grouped by the sign pattern of their leading coordinates; at each depth
// the candidates are the first few unused positions of every group, tried in
// order of the resulting prefix norm (ties: lower position). Grouping keeps
// every direction in view even when the input arrives sorted by direction.
// Branches whose prefix norm exceeds `bound` are cut. Each group is a doubly
// linked list, so removals undo in O(1) when backtracking.
std::vector<std::size_t> bounded_greedy_order(const VectorList& w, double bound, std::size_t window,
                                              std::size_t node_limit) {
  const std::size_t n = w.size();
  const std::size_t d = w.dim();
  std::vector<std::size_t> order(n);
  if (n == 0) return order;
  order[0] = 0;
  if (n == 1) return order;

  std::size_t bits = 0;
  while (bits < d && (std::size_t{4} << bits) <= window) ++bits;
  std::vector<std::size_t> group_of_code(std::size_t{1} << bits, n);
  std::vector<std::size_t> group(n, 0);
  std::size_t groups = 0;
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t code = 0;
    for (std::size_t j = 0; j < bits; ++j) {
      if (w[i][j] < 0.0) code |= std::size_t{1} << j;
    }
    if (group_of_code[code] == n) group_of_code[code] = groups++;
    group[i] = group_of_code[code];
  }
  const std::size_t per_group = std::max<std::size_t>(1, window / std::max<std::size_t>(groups, 1));

  // Node n + g is the sentinel of group g.
  std::vector<std::size_t> next(n + groups), prev(n + groups);
  for (std::size_t g = 0; g < groups; ++g) next[n + g] = prev[n + g] = n + g;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t s = n + group[i];
    const std::size_t last = prev[s];
    next[last] = i;
    prev[i] = last;
    next[i] = s;
    prev[s] = i;
  }

  std::vector<double> prefix(n * d);
  std::copy(w[0].begin(), w[0].end(), prefix.begin());
  std::vector<std::size_t> rank(n + 1, 0);

  struct Candidate {
    double norm;
    std::size_t pos;
  };
  std::vector<Candidate> cands;
  cands.reserve(per_group * groups);
  auto collect = [&](std::size_t depth) {
    cands.clear();
    const double* base = prefix.data() + (depth - 1) * d;
    for (std::size_t g = 0; g < groups; ++g) {
      const std::size_t s = n + g;
      std::size_t taken = 0;
      for (std::size_t p = next[s]; p != s && taken < per_group; p = next[p], ++taken) {
        const auto v = w[p];
        double sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double x = base[j] + v[j];
          sq += x * x;
        }
        const double nm = std::sqrt(sq);
        if (nm <= bound) cands.push_back({nm, p});
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      return a.norm < b.norm || (a.norm == b.norm && a.pos < b.pos);
    });
  };

  std::size_t nodes = 0;
  std::size_t depth = 1;
  rank[1] = 0;
  while (depth < n) {
    collect(depth);
    if (rank[depth] < cands.size()) {
      const std::size_t p = cands[rank[depth]].pos;
      next[prev[p]] = next[p];
      prev[next[p]] = prev[p];
      order[depth] = p;
      const double* base = prefix.data() + (depth - 1) * d;
      double* out = prefix.data() + depth * d;
      const auto v = w[p];
      for (std::size_t j = 0; j < d; ++j) out[j] = base[j] + v[j];
      ++depth;
      rank[depth] = 0;
      if (++nodes > node_limit) throw BudgetExhausted("confinement: node limit reached");
    } else {
      --depth;
      if (depth == 0) throw BudgetExhausted("confinement: no ordering meets the bound");
      const std::size_t p = order[depth];
      next[prev[p]] = p;
      prev[next[p]] = p;
      ++rank[depth];
    }
  }
  return order;
}

}  // namespace

ConstantSchedule::ConstantSchedule(std::vector<double> values) : values_(std::move(values)) {
  double last = 1.0;
  for (double v : values_) {
    if (!(v >= 1.0) || !std::isfinite(v)) throw ValidationError("constant schedule: values must be finite and >= 1");
    if (v < last) throw ValidationError("constant schedule: values must be nondecreasing");
    last = v;
  }
}

ConstantSchedule ConstantSchedule::parse(std::string_view csv) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = std::min(csv.find(',', start), csv.size());
    const std::string item(csv.substr(start, comma - start));
    if (item.find_first_not_of(" \t") != std::string::npos) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        throw ValidationError("constant schedule: not a number: '" + item + "'");
      }
      if (item.find_first_not_of(" \t", used) != std::string::npos) {
        throw ValidationError("constant schedule: not a number: '" + item + "'");
      }
      values.push_back(v);
    }
    start = comma + 1;
  }
  return ConstantSchedule(std::move(values));
}

ConstantSchedule ConstantSchedule::from_environment() {
  const char* env = std::getenv("RL_CONSTANT_SCHEDULE");
  if (env == nullptr || *env == '\0') return {};
  return parse(env);
}

double ConstantSchedule::at(std::size_t d) const {
  if (d == 0) throw InvalidInput("constant schedule: dimension must be >= 1");
  if (d <= values_.size()) return values_[d - 1];
  if (values_.empty()) return static_cast<double>(d) + 1.0;
  return values_.back() + static_cast<double>(d - values_.size());
}

const ConstantSchedule& published_schedule() {
  static const ConstantSchedule schedule = ConstantSchedule::from_environment();
  return schedule;
}

double published_constant(std::size_t d) { return published_schedule().at(d); }

std::vector<double> prefix_norms(const VectorList& vectors, std::span<const std::size_t> order) {
  std::vector<double> out;
  out.reserve(order.size());
  std::vector<double> s(vectors.dim(), 0.0);
  for (std::size_t p : order) {
    const auto v = vectors[p];
    for (std::size_t j = 0; j < s.size(); ++j) s[j] += v[j];
    out.push_back(norm(s));
  }
  return out;
}

ConfinementResult confine_zero_sum(const VectorList& vectors, double tol, const ConfineOptions& options) {
  ConfinementResult result;
  const std::size_t n = vectors.size();
  const std::size_t d = std::max<std::size_t>(vectors.dim(), 1);
  const double c_d = schedule_of(options).at(d);
  result.bound_used = c_d + tol;
  if (n == 0) return result;

  const double total = norm(sum_of(vectors));
  if (total > tol + kRoundingSlack * static_cast<double>(n)) {
    throw PreconditionViolation("confine_zero_sum: |sum| = " + std::to_string(total) + " exceeds tol");
  }
  double max_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_norm = std::max(max_norm, norm(vectors[i]));
  if (max_norm > 1.0 + tol + kRoundingSlack) {
    throw PreconditionViolation("confine_zero_sum: a vector has norm above 1");
  }

  if (max_norm == 0.0) {
    result.permutation.resize(n);
    std::iota(result.permutation.begin(), result.permutation.end(), std::size_t{0});
    result.prefix_norms.assign(n, 0.0);
    return result;
  }

  // Work in units of the largest norm so the ordering is scale-free.
  VectorList scaled(vectors.dim(), vectors.coords());
  for (std::size_t i = 0; i < n; ++i) {
    for (double& x : scaled[i]) x /= max_norm;
  }
  // In those units the bound C_d + |sum| / max_norm is itself scale-free and,
  // with max_norm <= 1, implies C_d + tol in the original units.
  double bound = c_d + total / max_norm;
  if (max_norm > 1.0) bound = std::min(bound, (c_d + tol) / max_norm);
  bound += kRoundingSlack;

  result.permutation = bounded_greedy_order(scaled, bound, std::max<std::size_t>(options.window, 1),
                                            options.node_limit);
  result.prefix_norms = prefix_norms(vectors, result.permutation);
  result.max_prefix_norm = *std::max_element(result.prefix_norms.begin(), result.prefix_norms.end());
  return result;
}

ConfinementResult confine_with_anchor(const VectorList& vectors, std::span<const double> b, double rho,
                                      const ConfineOptions& options) {
  const std::size_t n = vectors.size();
  const std::size_t d = std::max<std::size_t>(vectors.dim(), b.size());
  if (!(rho > 0.0)) throw PreconditionViolation("confine_with_anchor: rho must be positive");
  if (n > 0 && vectors.dim() != b.size()) throw InvalidInput("confine_with_anchor: anchor dimension mismatch");
  const double c_d = schedule_of(options).at(std::max<std::size_t>(d, 1));
  const double b_norm = norm(b);

  ConfinementResult result;
  if (n == 0) {
    result.bound_used = rho * c_d + b_norm;
    return result;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (norm(vectors[i]) > rho * (1.0 + kRoundingSlack)) {
      throw PreconditionViolation("confine_with_anchor: a vector has norm above rho");
    }
  }
  std::vector<double> residual = sum_of(vectors);
  for (std::size_t j = 0; j < residual.size(); ++j) residual[j] -= b[j];
  const double mismatch = norm(residual);
  const double anchor_tol = 1e-9 * std::max(1.0, rho) * static_cast<double>(n);
  if (mismatch > anchor_tol) {
    throw PreconditionViolation("confine_with_anchor: vectors do not sum to the anchor");
  }

  // -b goes in as `pieces` equal parts spread evenly through the list. Removing
  // them afterwards shifts each later prefix by at most |b|.
  const std::size_t pieces = b_norm == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(b_norm / rho - 1e-12));
  VectorList combined(vectors.dim());
  combined.reserve(n + pieces);
  std::vector<std::ptrdiff_t> origin;  // input position, or -1 for an anchor piece
  origin.reserve(n + pieces);
  std::vector<double> piece(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) piece[j] = -b[j] / static_cast<double>(pieces == 0 ? 1 : pieces);
  std::size_t placed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    combined.push_back(vectors[i]);
    origin.push_back(static_cast<std::ptrdiff_t>(i));
    while (placed < pieces && (placed + 1) * n <= (i + 1) * pieces) {
      combined.push_back(piece);
      origin.push_back(-1);
      ++placed;
    }
  }
  for (std::size_t i = 0; i < combined.size(); ++i) {
    for (double& x : combined[i]) x /= rho;
  }

  const double zero_tol = norm(sum_of(combined));
  const ConfinementResult inner = confine_zero_sum(combined, zero_tol, options);
  result.permutation.reserve(n);
  for (std::size_t p : inner.permutation) {
    if (origin[p] >= 0) result.permutation.push_back(static_cast<std::size_t>(origin[p]));
  }
  result.prefix_norms = prefix_norms(vectors, result.permutation);
  result.max_prefix_norm = *std::max_element(result.prefix_norms.begin(), result.prefix_norms.end());
  result.bound_used = rho * c_d + b_norm + mismatch;
  return result;
}

BruteForceResult brute_force_confine(const VectorList& vectors) {
  const std::size_t n = vectors.size();
  if (n > kBruteForceLimit) {
    throw SizeLimitExceeded("brute_force_confine: at most " + std::to_string(kBruteForceLimit) + " vectors");
  }
  BruteForceResult best;
  if (n == 0) return best;
  const std::size_t d = vectors.dim();

  std::vector<std::size_t> order(n);
  std::vector<bool> used(n, false);
  std::vector<double> prefix(n * d);
  std::copy(vectors[0].begin(), vectors[0].end(), prefix.begin());
  order[0] = 0;
  used[0] = true;
  best.min_max_prefix_norm = std::numeric_limits<double>::infinity();

  // Branch and bound; only strict improvements replace the incumbent, so the
  // first optimal ordering in lexicographic order wins.
  auto search = [&](auto&& self, std::size_t depth, double running_max) -> void {
    if (running_max >= best.min_max_prefix_norm) return;
    if (depth == n) {
      best.min_max_prefix_norm = running_max;
      best.ordering = order;
      return;
    }
    for (std::size_t p = 1; p < n; ++p) {
      if (used[p]) continue;
      double* out = prefix.data() + depth * d;
      const double* base = prefix.data() + (depth - 1) * d;
      for (std::size_t j = 0; j < d; ++j) out[j] = base[j] + vectors[p][j];
      used[p] = true;
      order[depth] = p;
      self(self, depth + 1, std::max(running_max, norm({out, d})));
      used[p] = false;
    }
  };
  search(search, 1, norm(vectors[0]));
  return best;
}

}  // namespace rearrange
