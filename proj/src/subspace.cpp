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

#include "rearrange/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "rearrange/errors.hpp"

namespace rearrange {
namespace {

using Rational = boost::multiprecision::cpp_rational;
using RationalMatrix = std::vector<std::vector<Rational>>;

constexpr double kCancellationFloor = 64.0 * std::numeric_limits<double>::epsilon();

// Rows: oscillating generators; columns: the given family members.
RationalMatrix generator_matrix(const std::vector<CanonicalForm>& forms) {
  std::set<GeneratorKey> keys;
  for (const auto& form : forms) {
    for (const auto& [key, coef] : form.oscillating) keys.insert(key);
  }
  RationalMatrix m;
  for (const auto& key : keys) {
    std::vector<Rational> row;
    for (const auto& form : forms) {
      const auto it = form.oscillating.find(key);
      row.emplace_back(it == form.oscillating.end() ? 0.0 : it->second);
    }
    m.push_back(std::move(row));
  }
  return m;
}

// In-place reduced row echelon form; returns the pivot column of each row used.
std::vector<std::size_t> reduce(RationalMatrix& m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    std::size_t pick = row;
    while (pick < m.size() && m[pick][col] == 0) ++pick;
    if (pick == m.size()) continue;
    std::swap(m[row], m[pick]);
    const Rational lead = m[row][col];
    for (auto& x : m[row]) x /= lead;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col] == 0) continue;
      const Rational factor = m[r][col];
      for (std::size_t c = 0; c < cols; ++c) m[r][c] -= factor * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::vector<CanonicalForm> forms_of(const FamilyVector& fam, std::size_t d) {
  std::vector<CanonicalForm> forms;
  for (std::size_t i = 0; i < d; ++i) forms.push_back(canonical_form(fam[i]));
  return forms;
}

std::vector<CoefficientVector> exact_k_basis(const FamilyVector& fam, std::size_t d) {
  RationalMatrix m = generator_matrix(forms_of(fam, d));
  const std::vector<std::size_t> pivots = reduce(m, d);
  std::vector<bool> is_pivot(d, false);
  for (std::size_t p : pivots) is_pivot[p] = true;

  std::vector<CoefficientVector> basis;
  for (std::size_t free = 0; free < d; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> s(d, Rational(0));
    s[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) s[pivots[r]] = -m[r][free];
    const auto first = std::find_if(s.begin(), s.end(), [](const Rational& x) { return x != 0; });
    const Rational sign = *first < 0 ? Rational(-1) : Rational(1);
    std::vector<double> dense(d);
    for (std::size_t i = 0; i < d; ++i) dense[i] = (sign * s[i]).convert_to<double>();
    basis.push_back(CoefficientVector::from_dense(dense));
  }
  return basis;
}

}  // namespace

CoefficientVector CoefficientVector::from_dense(std::span<const double> dense) {
  CoefficientVector v;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      v.support.push_back(i);
      v.values.push_back(dense[i]);
    }
  }
  return v;
}

std::vector<double> CoefficientVector::dense(std::size_t d) const {
  std::vector<double> out(d, 0.0);
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] >= d) throw InvalidInput("coefficient vector reaches past dimension");
    out[support[k]] = values[k];
  }
  return out;
}

double CoefficientVector::dot(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] < x.size()) s += values[k] * x[support[k]];
  }
  return s;
}

std::string to_string(GrowthVerdict v) {
  switch (v) {
    case GrowthVerdict::kDivergent:
      return "divergent";
    case GrowthVerdict::kMember:
      return "member";
    case GrowthVerdict::kInconclusive:
      break;
  }
  return "inconclusive";
}

GrowthDiagnostic growth_test(const FamilyVector& fam, std::span<const double> direction, const GrowthConfig& config) {
  GrowthDiagnostic diag;
  const std::size_t d = std::min(direction.size(), fam.size());
  double top = 0.0;
  for (std::size_t i = 0; i < d; ++i) top = std::max(top, std::abs(direction[i]));
  diag.direction.assign(direction.begin(), direction.begin() + static_cast<std::ptrdiff_t>(d));
  if (top == 0.0) {
    diag.verdict = GrowthVerdict::kMember;
    return diag;
  }
  for (double& x : diag.direction) x /= top;

  const std::size_t n = std::max<std::size_t>(config.truncation, 4);
  double acc = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    if (m == n / 4) diag.abs_sum_quarter = acc;
    if (m == n / 2) diag.abs_sum_half = acc;
    double v = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (diag.direction[i] == 0.0) continue;
      const double x = diag.direction[i] * term(fam[i], m);
      v += x;
      scale += std::abs(x);
    }
    // Cancellation residue at rounding level counts as zero; otherwise an
    // exact dependency would grow like the harmonic series.
    if (std::abs(v) > kCancellationFloor * scale) acc += std::abs(v);
  }
  diag.abs_sum_full = acc;
  const double early = diag.abs_sum_half - diag.abs_sum_quarter;
  const double late = diag.abs_sum_full - diag.abs_sum_half;
  if (late <= std::numeric_limits<double>::min()) {
    diag.increment_ratio = 0.0;
  } else if (early <= std::numeric_limits<double>::min()) {
    diag.increment_ratio = std::numeric_limits<double>::infinity();
  } else {
    diag.increment_ratio = late / early;
  }
  if (diag.increment_ratio >= config.divergent_ratio) {
    diag.verdict = GrowthVerdict::kDivergent;
  } else if (diag.increment_ratio <= config.member_ratio) {
    diag.verdict = GrowthVerdict::kMember;
  }
  return diag;
}

std::vector<std::vector<double>> r_space(const std::vector<CoefficientVector>& k_basis, std::size_t d) {
  std::vector<std::vector<double>> out;
  if (d == 0) return out;
  if (k_basis.empty()) {
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<double> e(d, 0.0);
      e[i] = 1.0;
      out.push_back(std::move(e));
    }
    return out;
  }
  const auto rows = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd k(rows, static_cast<Eigen::Index>(k_basis.size()));
  for (std::size_t c = 0; c < k_basis.size(); ++c) {
    const auto dense = k_basis[c].dense(d);
    for (std::size_t i = 0; i < d; ++i) k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = dense[i];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(k);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, rows);
  for (Eigen::Index c = qr.rank(); c < rows; ++c) {
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = q(static_cast<Eigen::Index>(i), c);
    out.push_back(std::move(v));
  }
  return out;
}

KSpaceAnalysis analyze_k_space(const FamilyVector& fam, std::size_t d, const GrowthConfig& config) {
  if (d > fam.size()) throw InvalidInput("analyze_k_space: dimension exceeds family size");
  KSpaceAnalysis out;
  out.k_basis = exact_k_basis(fam, d);
  out.r_basis = r_space(out.k_basis, d);
  for (const auto& k : out.k_basis) {
    GrowthDiagnostic diag = growth_test(fam, k.dense(d), config);
    diag.declared_member = true;
    if (diag.verdict == GrowthVerdict::kDivergent) {
      throw DisagreementError("declared K vector fails the absolute-convergence growth test");
    }
    out.diagnostics.push_back(std::move(diag));
  }
  for (const auto& r : out.r_basis) {
    GrowthDiagnostic diag = growth_test(fam, r, config);
    if (diag.verdict == GrowthVerdict::kMember) {
      throw DisagreementError("vector outside declared K tests absolutely convergent");
    }
    out.diagnostics.push_back(std::move(diag));
  }
  return out;
}

std::vector<CoefficientVector> k_space_basis(const FamilyVector& fam, std::size_t d, const GrowthConfig& config) {
  return analyze_k_space(fam, d, config).k_basis;
}

DependencyStructure dependency_decompose(const FamilyVector& fam, double precision) {
  DependencyStructure out;
  const std::vector<CanonicalForm> forms = forms_of(fam, fam.size());
  const RationalMatrix full = generator_matrix(forms);

  for (std::size_t j = 0; j < fam.size(); ++j) {
    // Columns: current independent members, then a^j.
    RationalMatrix m(full.size());
    for (std::size_t r = 0; r < full.size(); ++r) {
      for (std::size_t k : out.independent) m[r].push_back(full[r][k]);
      m[r].push_back(full[r][j]);
    }
    const std::size_t cols = out.independent.size() + 1;
    const std::vector<std::size_t> pivots = reduce(m, cols);
    const bool independent = std::find(pivots.begin(), pivots.end(), cols - 1) != pivots.end();
    if (independent) {
      out.independent.push_back(j);
      continue;
    }

    // a^j's generators equal sum_k coef_k a^k's, so sum_k (-coef_k) a^k + a^j
    // keeps only absolutely convergent parts.
    std::vector<std::pair<std::size_t, double>> coefs;
    CanonicalForm remainder = forms[j];
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      const double coef = m[r][cols - 1].convert_to<double>();
      if (coef == 0.0) continue;
      const std::size_t k = out.independent[pivots[r]];
      coefs.emplace_back(k, -coef);
      for (const auto& [scale, part] : forms[k].absolute) remainder.absolute.emplace_back(-coef * scale, part);
    }
    std::vector<ComboTerm> parts;
    for (const auto& [scale, part] : remainder.absolute) {
      parts.push_back({scale, SeriesSpec::abs_power(part.exponent, part.scale, part.sign_level), std::nullopt});
    }
    SeriesPtr rest = SeriesSpec::composite(std::move(parts));
    out.abs_sums[j] = classical_sum(*rest, precision);
    out.remainders[j] = std::move(rest);
    out.coefficients[j] = std::move(coefs);
  }
  return out;
}

SeriesPtr recompose(const DependencyStructure& s, const FamilyVector& fam, std::size_t j) {
  const auto it = s.coefficients.find(j);
  if (it == s.coefficients.end()) throw InvalidInput("recompose: member is not dependent");
  std::vector<ComboTerm> terms;
  for (const auto& [k, coef] : it->second) terms.push_back({-coef, fam.specs.at(k), k});
  terms.push_back({1.0, s.remainders.at(j), std::nullopt});
  return SeriesSpec::composite(std::move(terms));
}

double predicted_dependent_limit(const DependencyStructure& s, const std::map<std::size_t, double>& achieved,
                                 std::size_t j) {
  const auto it = s.coefficients.find(j);
  if (it == s.coefficients.end()) throw InvalidInput("predicted_dependent_limit: member is not dependent");
  double value = s.abs_sums.at(j);
  for (const auto& [k, coef] : it->second) {
    const auto a = achieved.find(k);
    if (a == achieved.end()) throw InvalidInput("predicted_dependent_limit: no achieved value for a^" + std::to_string(k));
    value -= coef * a->second;
  }
  return value;
}

bool membership_check(std::span<const double> xbar, const std::vector<CoefficientVector>& k_basis, double tol) {
  return std::all_of(k_basis.begin(), k_basis.end(),
                     [&](const CoefficientVector& s) { return std::abs(s.dot(xbar)) <= tol; });
}

}  // namespace rearrange
